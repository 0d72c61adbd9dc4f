#include <fstream>

#include "fedload/common/error.hpp"
#include "fedload/data/shards.hpp"
#include "json.hpp"

namespace fedload::data {

using nlohmann::json;

void write_dataset_dump(const std::filesystem::path& dir, const std::vector<ApSeries>& series,
                        const std::vector<DeploymentShard>& shards) {
  std::filesystem::create_directories(dir);
  for (const auto& s : series) write_csv(dir / ("ap_" + s.ap_id + ".csv"), {s});

  json assignment = json::object();
  json scalers = json::array();
  for (const auto& shard : shards) {
    for (const auto& ap : shard.ap_ids) assignment[ap] = shard.deployment_id;
    scalers.push_back({{"deployment_id", shard.deployment_id},
                       {"min", shard.scaler.min},
                       {"max", shard.scaler.max}});
  }
  const json manifest = {{"features", {"load", "num_users", "hour", "weekday"}},
                         {"step_seconds", kBinSeconds},
                         {"assignment", assignment},
                         {"scalers", scalers}};
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw DataError("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  Manifest m;
  try {
    const json j = json::parse(in);
    for (const auto& [ap, dep] : j.at("assignment").items()) {
      m.assignment.emplace_back(ap, dep.get<int>());
    }
    for (const auto& s : j.at("scalers")) {
      m.scalers.emplace_back(s.at("deployment_id").get<int>(),
                             ScalerParams{s.at("min").get<std::vector<double>>(),
                                          s.at("max").get<std::vector<double>>()});
    }
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return m;
}

}  // namespace fedload::data
