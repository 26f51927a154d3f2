#pragma once
// PPO with clipped surrogate, entropy bonus, GAE, and dual critics (one per
// reward stream). Advantages are mixed as A_task + lambda * A_div and
// normalized per minibatch.

#include <cstdint>
#include <span>
#include <vector>

#include "sdax/bilevel.hpp"
#include "sdax/net.hpp"
#include "sdax/policy.hpp"
#include "sdax/rng.hpp"

namespace sdax {

struct PpoConfig {
  double clip = 0.2;
  int epochs = 5;
  double gae_lambda = 0.95;
  double gamma = 0.99;
  int horizon = 24;
  double entropy_coef = 0.001;
  double lr = 0.0005;
  int minibatches = 4;
  double value_coef = 0.5;
  // Eq.-style per-sample dot-then-mean variant of the meta-gradient
  bool per_sample_dot = false;
};

struct RolloutBatch {
  std::vector<Vec> obs;  // without skill block
  std::vector<Vec> z;
  std::vector<Vec> act;
  Vec logp_old, r_task, r_div;
  std::vector<std::uint8_t> done;
  Vec v_task, v_div;
  Vec adv_task, adv_div, ret_task, ret_div;

  int size() const { return static_cast<int>(obs.size()); }
};

// values carries one extra bootstrap entry (size n+1).
void gae(std::span<const double> rewards, std::span<const double> values,
         std::span<const std::uint8_t> dones, double gamma, double lam,
         std::span<double> adv, std::span<double> ret);

struct PpoDiagnostics {
  double surrogate = 0.0;
  double vloss_task = 0.0;
  double vloss_div = 0.0;
  double entropy = 0.0;
  bool skipped = false;
  GradSnapshot snapshot;  // filled when want_snapshot
};

struct CriticHead {
  Net net;  // [obs, z] -> 1
  Vec params;
  AdamState adam;

  CriticHead() = default;
  CriticHead(int obs_dim, int skill_dim, const std::vector<int>& hidden,
             Activation act, Rng& rng);
  double eval(std::span<const double> s, std::span<const double> z,
              NetWorkspace& ws) const;
};

PpoDiagnostics ppo_update(const GaussianPolicy& policy, Vec& theta,
                          AdamState& theta_adam, CriticHead& task_critic,
                          CriticHead& div_critic, const RolloutBatch& batch,
                          double lambda, const PpoConfig& cfg, Rng& rng,
                          bool want_snapshot);

// Vanilla policy-gradient inner update theta' = theta + alpha * mean[(A_task
// + lambda A_div) dlogpi]; the form the lambda meta-gradient differentiates.
Vec theta_prime(const GaussianPolicy& policy, const Vec& theta,
                const RolloutBatch& batch, double alpha, double lambda);

// Batch-mean of A * dlogpi/dtheta at the given parameters.
Vec weighted_logp_grad_mean(const GaussianPolicy& policy, const Vec& theta,
                            const RolloutBatch& batch,
                            std::span<const double> weights);

}  // namespace sdax
