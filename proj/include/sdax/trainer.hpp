#pragma once
// End-to-end training loop: collect with both reward streams, update the
// representation and its multiplier, PPO on the mixed advantage, then the
// balancing parameter — in that order, every iteration.

#include <functional>
#include <memory>
#include <string>

#include "sdax/checkpoint.hpp"
#include "sdax/config.hpp"
#include "sdax/env.hpp"
#include "sdax/intrinsic.hpp"
#include "sdax/policy.hpp"
#include "sdax/ppo.hpp"

namespace sdax {

struct IterStats {
  int iteration = 0;
  double mean_r_task = 0.0;
  double mean_r_div = 0.0;
  double lambda = 0.0;
  double kappa = 0.0;
  double surrogate = 0.0;
  double vloss_task = 0.0;
  double vloss_div = 0.0;
  double entropy = 0.0;
  double obstacles_passed = 0.0;  // windowed mean over completed episodes
  double ep_return_task = 0.0;
  double ep_return_div = 0.0;
  int episodes_done = 0;
  double meta_grad = 0.0;
  double violation = 0.0;  // metra constraint violation
};

// Exception carrying the "numerical fault" exit contract.
struct NumericalFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Trainer {
 public:
  Trainer(const ExperimentConfig& cfg, std::uint64_t seed);

  // Runs cfg.iterations iterations. Writes one metrics row per iteration to
  // metrics_path (empty: no file), checkpoints into ckpt_dir (empty: none).
  // on_iter, when set, may return false to stop early.
  void run(const std::string& metrics_path, const std::string& ckpt_dir,
           const std::function<bool(const IterStats&)>& on_iter = {});

  void train_iteration();

  Checkpoint make_checkpoint() const;
  const IterStats& stats() const { return stats_; }
  int iteration() const { return iter_; }
  const Vec& theta() const { return theta_; }
  const GaussianPolicy& policy() const { return policy_; }
  const LambdaState& lambda_state() const { return lambda_; }
  const IntrinsicReward* intrinsic() const { return intrinsic_.get(); }

  static std::string metrics_header();
  static std::string metrics_row(const IterStats& s);

 private:
  void collect();
  Vec sample_skill();

  ExperimentConfig cfg_;
  Method method_;
  std::uint64_t seed_;
  int iter_ = 0;

  GaussianPolicy policy_;
  Vec theta_;
  AdamState theta_adam_;
  CriticHead task_critic_, div_critic_;
  std::unique_ptr<IntrinsicReward> intrinsic_;
  LambdaState lambda_;

  std::vector<ObstacleCourse> envs_;
  std::vector<Vec> env_obs_;      // current obs (without skill) per env
  std::vector<Vec> env_skill_;
  std::vector<double> ep_ret_task_, ep_ret_div_;

  Rng skill_rng_, action_rng_, env_rng_, update_rng_;

  RolloutBatch batch_;
  std::vector<FeatureTransition> feat_batch_;

  // sliding window over completed episodes
  std::vector<double> win_obstacles_, win_ret_task_, win_ret_div_;
  int win_pos_ = 0;
  int win_count_ = 0;
  int episodes_done_total_ = 0;

  IterStats stats_;
};

}  // namespace sdax
