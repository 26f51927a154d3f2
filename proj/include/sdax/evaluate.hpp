#pragma once
// Deterministic evaluation: mean-action rollouts, trajectory dumps, and the
// random-skill success-ratio measurement.

#include <optional>
#include <string>

#include "sdax/checkpoint.hpp"
#include "sdax/env.hpp"
#include "sdax/policy.hpp"

namespace sdax {

struct RolloutSummary {
  int obstacles_passed = 0;
  double episode_return_task = 0.0;
  double episode_return_div = 0.0;
  int steps = 0;
  Termination cause = Termination::none;
};

std::string to_string(Termination t);

// One deterministic rollout (action = policy mean). When csv_path is
// non-empty, writes one row per step: t,x,z,vx,vz,body_angle,r_task,r_div,done.
RolloutSummary evaluate_rollout(const Checkpoint& ck, const Vec& skill,
                                const std::string& csv_path = "");

struct CollapseResult {
  double mean = 0.0;  // percent
  double stddev = 0.0;
  std::vector<double> per_repeat;  // percent per repeat
};

// Table-1 style measurement: n_repeats batches of n_skills random skills,
// success = clearing at least min_obstacles obstacles on a deterministic
// rollout. stddev is the sample std over repeats.
CollapseResult evaluate_positive_collapse(const Checkpoint& ck,
                                          int n_skills = 100,
                                          int n_repeats = 10,
                                          std::uint64_t eval_seed = 1234,
                                          int min_obstacles = 1);

// Builds the policy and an env matching a checkpoint (shared by tools).
GaussianPolicy policy_from_checkpoint(const Checkpoint& ck);

}  // namespace sdax
