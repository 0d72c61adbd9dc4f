#include "fedload/data/series.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "fedload/common/error.hpp"

namespace fedload::data {
namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

template <class T>
bool parse_number(std::string_view text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

}  // namespace

int hour_of_day(std::int64_t timestamp) {
  return static_cast<int>(floor_div(timestamp, 3600) % 24 + 24) % 24;
}

int day_of_week(std::int64_t timestamp) {
  // 1970-01-01 was a Thursday (index 3 with Monday = 0).
  return static_cast<int>((floor_div(timestamp, 86400) + 3) % 7 + 7) % 7;
}

std::vector<ApSeries> aggregate_records(std::vector<RawRecord> records) {
  std::map<std::string, std::vector<const RawRecord*>> by_ap;
  for (const auto& r : records) by_ap[r.ap_id].push_back(&r);

  std::vector<ApSeries> out;
  for (auto& [ap_id, rows] : by_ap) {
    std::stable_sort(rows.begin(), rows.end(), [](const RawRecord* a, const RawRecord* b) {
      return a->timestamp < b->timestamp;
    });
    const std::int64_t first = floor_div(rows.front()->timestamp, kBinSeconds);
    const std::int64_t last = floor_div(rows.back()->timestamp, kBinSeconds);
    const auto bins = static_cast<std::size_t>(last - first + 1);

    ApSeries series;
    series.ap_id = ap_id;
    series.start_time = first * kBinSeconds;
    series.features = nn::Tensor({bins, kFeatureCount});
    for (const RawRecord* r : rows) {
      const auto bin = static_cast<std::size_t>(floor_div(r->timestamp, kBinSeconds) - first);
      series.features.at(bin, kLoad) += static_cast<double>(r->load_bytes);
      series.features.at(bin, kUsers) =
          std::max(series.features.at(bin, kUsers), static_cast<double>(r->num_users));
    }
    for (std::size_t i = 0; i < bins; ++i) {
      const std::int64_t t = series.start_time + static_cast<std::int64_t>(i) * kBinSeconds;
      series.features.at(i, kHour) = hour_of_day(t);
      series.features.at(i, kWeekday) = day_of_week(t);
    }
    out.push_back(std::move(series));
  }
  return out;
}

std::vector<RawRecord> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("CSV is empty");
  if (trim(line) != "timestamp,ap_id,load_bytes,num_users") {
    throw DataError("line 1: expected header 'timestamp,ap_id,load_bytes,num_users'");
  }
  std::vector<RawRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty()) continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = text.find(',', start);
      fields.push_back(trim(text.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    RawRecord r;
    if (fields.size() != 4 || !parse_number(fields[0], r.timestamp) || fields[1].empty() ||
        !parse_number(fields[2], r.load_bytes) || !parse_number(fields[3], r.num_users)) {
      throw DataError("line " + std::to_string(line_no) + ": malformed row '" +
                      std::string(text) + "'");
    }
    r.ap_id = std::string(fields[1]);
    records.push_back(std::move(r));
  }
  if (records.empty()) throw DataError("CSV has no data rows");
  return records;
}

std::vector<ApSeries> ingest_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return aggregate_records(parse_csv(in));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_csv(std::ostream& out, const std::vector<ApSeries>& series) {
  out << "timestamp,ap_id,load_bytes,num_users\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.length(); ++i) {
      out << s.start_time + static_cast<std::int64_t>(i) * s.step_seconds << ','
          << s.ap_id << ',' << static_cast<std::uint64_t>(s.features.at(i, kLoad)) << ','
          << static_cast<std::uint64_t>(s.features.at(i, kUsers)) << '\n';
    }
  }
}

void write_csv(const std::filesystem::path& path, const std::vector<ApSeries>& series) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  write_csv(out, series);
}

std::pair<ApSeries, ApSeries> chrono_split(const ApSeries& series, double train_ratio) {
  require(train_ratio > 0.0 && train_ratio < 1.0, "chrono_split: ratio must be in (0, 1)");
  const std::size_t total = series.length();
  const auto cut = static_cast<std::size_t>(train_ratio * static_cast<double>(total));
  const std::size_t width = series.features.empty() ? kFeatureCount : series.features.dim(1);
  const auto values = series.features.values();

  ApSeries train{series.ap_id, series.start_time, series.step_seconds,
                 nn::Tensor({cut, width}, std::vector<double>(values.begin(),
                                                              values.begin() + cut * width))};
  ApSeries test{series.ap_id,
                series.start_time + static_cast<std::int64_t>(cut) * series.step_seconds,
                series.step_seconds,
                nn::Tensor({total - cut, width},
                           std::vector<double>(values.begin() + cut * width, values.end()))};
  return {std::move(train), std::move(test)};
}

}  // namespace fedload::data
