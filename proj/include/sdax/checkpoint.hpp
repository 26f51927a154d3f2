#pragma once
// Versioned JSON checkpoints. 64-bit values round-trip exactly (shortest
// round-trip decimal serialization).

#include <cstdint>
#include <string>

#include "sdax/bilevel.hpp"
#include "sdax/config.hpp"

namespace sdax {

struct Checkpoint {
  static constexpr int kVersion = 1;
  ExperimentConfig cfg;
  std::uint64_t seed = 0;
  int iteration = 0;
  Vec theta;       // policy params incl. log_std block
  Vec psi_task;    // task critic
  Vec psi_div;     // div critic
  Vec phi;         // metra/diayn representation params (empty if unused)
  Vec rnd_target, rnd_predictor;  // rnd params (empty if unused)
  double kappa = 0.0;
  LambdaState lambda;
};

void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace sdax
