#pragma once

#include <cstdint>

namespace fedload::strategies {

/// Training hyper-parameters shared by all four regimes.
struct TrainConfig {
  std::size_t rounds = 5;             // T, FL and KD-gen
  std::size_t local_epochs = 2;       // E_l, FL and KD-gen
  std::size_t global_epochs = 2;      // E_g, ICL and DSCL
  std::size_t batch = 32;             // B
  double learning_rate = 0.01;        // eta
  double generator_learning_rate = 0.01;  // alpha
  std::size_t clients_per_round = 2;  // S
  double lambda_kd = 1.0;             // weight of the synthetic term in l'
  int bytes_per_param = 4;
  std::uint64_t seed = 42;
  std::size_t workers = 1;            // concurrent clients; results do not depend on it
  bool fixed_clock = false;           // record 0 ms for every timing scope
};

}  // namespace fedload::strategies
