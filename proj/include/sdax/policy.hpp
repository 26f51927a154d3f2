#pragma once
// Skill-conditioned diagonal-Gaussian policy. Network maps [s, z] to the
// action mean; log-stds are state-independent trainable parameters stored
// after the network block in the flat parameter vector.

#include <span>
#include <vector>

#include "sdax/net.hpp"
#include "sdax/rng.hpp"

namespace sdax {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

struct ActResult {
  Vec action;
  double log_prob = 0.0;
};

class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(int obs_dim, int skill_dim, int action_dim,
                 const std::vector<int>& hidden, Activation act);

  int obs_dim() const { return obs_dim_; }
  int skill_dim() const { return skill_dim_; }
  int action_dim() const { return action_dim_; }
  int param_count() const { return net_.param_count() + action_dim_; }
  const Net& net() const { return net_; }
  int log_std_offset() const { return net_.param_count(); }

  // Final layer scaled small so early actions stay near zero; log_std
  // initialized to 0 (sigma = 1).
  Vec init_params(Rng& rng) const;

  void mean(std::span<const double> params, std::span<const double> s,
            std::span<const double> z, NetWorkspace& ws, Vec& mu) const;

  ActResult act(std::span<const double> params, std::span<const double> s,
                std::span<const double> z, Rng& rng, NetWorkspace& ws) const;

  double log_prob(std::span<const double> params, std::span<const double> s,
                  std::span<const double> z, std::span<const double> a,
                  NetWorkspace& ws) const;

  // log pi given a cached forward (mean in ws); params only for log_std.
  double log_prob_cached(std::span<const double> params, const NetWorkspace& ws,
                         std::span<const double> a) const;

  // Accumulates d(log pi)/d(params) into grad. Reuses the cached forward
  // in ws when avail_cached is true (ws must match (params, s, z)).
  void log_prob_grad(std::span<const double> params, std::span<const double> s,
                     std::span<const double> z, std::span<const double> a,
                     std::span<double> grad, NetWorkspace& ws) const;

  // Backward with an externally supplied cotangent on (mean, log_std):
  // cot_mean drives the network, cot_log_std adds directly.
  void backward_heads(std::span<const double> params, const NetWorkspace& ws,
                      std::span<const double> cot_mean,
                      std::span<const double> cot_log_std,
                      std::span<double> grad) const;

  double entropy(std::span<const double> params) const;

  void clamp_log_std(std::span<double> params) const;

  double sigma(std::span<const double> params, int i) const;

 private:
  void stack_input(std::span<const double> s, std::span<const double> z,
                   Vec& buf) const;

  Net net_;
  int obs_dim_ = 0, skill_dim_ = 0, action_dim_ = 0;
  mutable Vec input_buf_;
};

}  // namespace sdax
