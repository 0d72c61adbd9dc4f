#include "fedload/data/series.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "fedload/common/error.hpp"
#include "fedload/common/random.hpp"

namespace fedload::data {

std::vector<ApSeries> synth_generate(const SynthOptions& options) {
  require(options.days >= 1, "synth_generate: days must be >= 1");
  const std::size_t steps = options.days * static_cast<std::size_t>(86400 / kBinSeconds);

  std::vector<ApSeries> out;
  out.reserve(options.n_aps);
  for (std::size_t ap = 0; ap < options.n_aps; ++ap) {
    Rng rng = make_rng(options.seed, "synth-ap", ap);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    const double base = std::exp(between(std::log(2e5), std::log(5e6)));
    const double diurnal_amp = between(0.4, 0.9);
    const double weekly_amp = between(0.05, 0.3);
    const double peak_hour = between(10.0, 16.0);
    const double noise_scale = between(0.2, 0.5);
    const double noise_sigma = between(0.25, 0.6);
    const double users_per_level = between(5.0, 40.0);
    std::lognormal_distribution<double> noise(0.0, noise_sigma);
    std::lognormal_distribution<double> user_noise(0.0, 0.2);

    char id[16];
    std::snprintf(id, sizeof(id), "ap%03zu", ap);
    ApSeries series;
    series.ap_id = id;
    series.start_time = options.start_time;
    series.features = nn::Tensor({steps, kFeatureCount});
    for (std::size_t i = 0; i < steps; ++i) {
      const std::int64_t t = options.start_time + static_cast<std::int64_t>(i) * kBinSeconds;
      const double hour = static_cast<double>((t % 86400 + 86400) % 86400) / 3600.0;
      const int weekday = day_of_week(t);
      const double diurnal = std::cos(2.0 * std::numbers::pi * (hour - peak_hour) / 24.0);
      const double weekly = weekday < 5 ? 1.0 : -1.0;
      const double level =
          std::max(0.05, 1.0 + diurnal_amp * diurnal + weekly_amp * weekly);
      const double load = base * level + base * noise_scale * noise(rng);

      series.features.at(i, kLoad) = std::round(load);
      series.features.at(i, kUsers) = std::round(users_per_level * level * user_noise(rng));
      series.features.at(i, kHour) = hour_of_day(t);
      series.features.at(i, kWeekday) = weekday;
    }
    out.push_back(std::move(series));
  }
  return out;
}

}  // namespace fedload::data
