#include "sdax/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace sdax {

namespace {
// fixed stream ids for decorrelated rng streams derived from the root seed
enum Stream : std::uint64_t {
  kPolicyInit = 0,
  kTaskCriticInit = 1,
  kDivCriticInit = 2,
  kIntrinsicInit = 3,
  kSkills = 4,
  kActions = 5,
  kEnv = 6,
  kUpdate = 7,
};
}  // namespace

Trainer::Trainer(const ExperimentConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), method_(cfg.method_kind()), seed_(seed) {
  cfg_.validate();
  const Activation act = activation_from_string(cfg_.policy_activation);
  const int obs_dim = ObstacleCourse::kObsDim;

  Rng pol_rng(split_seed(seed, kPolicyInit));
  policy_ = GaussianPolicy(obs_dim, cfg_.skill_dim, 4, cfg_.policy_hidden, act);
  theta_ = policy_.init_params(pol_rng);
  theta_adam_ = AdamState(theta_.size());

  Rng c1_rng(split_seed(seed, kTaskCriticInit));
  Rng c2_rng(split_seed(seed, kDivCriticInit));
  task_critic_ = CriticHead(obs_dim, cfg_.skill_dim, cfg_.value_hidden, act, c1_rng);
  div_critic_ = CriticHead(obs_dim, cfg_.skill_dim, cfg_.value_hidden, act, c2_rng);

  ObstacleCourse probe(cfg_.env);
  Vec probe_skill(cfg_.skill_dim, 0.0);
  Rng tmp(0);
  probe.reset(tmp, probe_skill);
  const int feat_dim = probe.diversity_dim();

  // A discovery method pinned at lambda = 0 is the task-only baseline; skip
  // the intrinsic module entirely so the two runs are bit-identical.
  const bool lambda_pinned_zero =
      cfg_.lambda_mode == "fixed" && cfg_.lambda_fixed == 0.0 &&
      (method_ == Method::sdax_metra || method_ == Method::sdax_diayn);

  Rng intr_rng(split_seed(seed, kIntrinsicInit));
  switch (lambda_pinned_zero ? Method::task_only : method_) {
    case Method::sdax_metra:
    case Method::div_only:  // div-only uses the default discovery module
      intrinsic_ = std::make_unique<Metra>(feat_dim, cfg_.skill_dim, cfg_.metra,
                                           intr_rng);
      break;
    case Method::sdax_diayn:
      intrinsic_ = std::make_unique<Diayn>(feat_dim, cfg_.skill_dim, cfg_.diayn,
                                           intr_rng);
      break;
    case Method::rnd:
      intrinsic_ = std::make_unique<Rnd>(feat_dim, cfg_.rnd, intr_rng);
      break;
    case Method::task_only:
      intrinsic_ = nullptr;
      break;
  }

  lambda_.beta = cfg_.lambda_beta;
  lambda_.lambda_min = cfg_.lambda_min;
  lambda_.lambda_max = cfg_.lambda_max;
  switch (method_) {
    case Method::task_only:
      lambda_.lambda = 0.0;
      lambda_.lambda_min = 0.0;
      lambda_.fixed = true;
      break;
    case Method::div_only:
    case Method::rnd:
      lambda_.lambda = cfg_.lambda_fixed;
      lambda_.lambda_min = 0.0;
      lambda_.fixed = true;
      break;
    default:
      if (cfg_.lambda_mode == "fixed") {
        lambda_.lambda = cfg_.lambda_fixed;
        lambda_.lambda_min = 0.0;
        lambda_.fixed = true;
      } else {
        lambda_.lambda = cfg_.lambda_init;
      }
      break;
  }

  skill_rng_.reseed(split_seed(seed, kSkills));
  action_rng_.reseed(split_seed(seed, kActions));
  env_rng_.reseed(split_seed(seed, kEnv));
  update_rng_.reseed(split_seed(seed, kUpdate));

  envs_.reserve(cfg_.num_envs);
  for (int i = 0; i < cfg_.num_envs; ++i) envs_.emplace_back(cfg_.env);
  env_obs_.resize(cfg_.num_envs);
  env_skill_.resize(cfg_.num_envs);
  ep_ret_task_.assign(cfg_.num_envs, 0.0);
  ep_ret_div_.assign(cfg_.num_envs, 0.0);
  for (int i = 0; i < cfg_.num_envs; ++i) {
    env_skill_[i] = sample_skill();
    Vec o = envs_[i].reset(env_rng_, env_skill_[i]);
    env_obs_[i].assign(o.begin(), o.begin() + ObstacleCourse::kObsDim);
  }

  win_obstacles_.assign(cfg_.metric_window, 0.0);
  win_ret_task_.assign(cfg_.metric_window, 0.0);
  win_ret_div_.assign(cfg_.metric_window, 0.0);
}

Vec Trainer::sample_skill() {
  Vec z(cfg_.skill_dim);
  for (auto& v : z) v = skill_rng_.normal();
  return z;
}

void Trainer::collect() {
  const int n_envs = cfg_.num_envs;
  const int horizon = cfg_.ppo.horizon;
  const int n = n_envs * horizon;

  batch_ = RolloutBatch{};
  batch_.obs.resize(n);
  batch_.z.resize(n);
  batch_.act.resize(n);
  batch_.logp_old.resize(n);
  batch_.r_task.resize(n);
  batch_.r_div.resize(n);
  batch_.done.resize(n);
  batch_.v_task.resize(n);
  batch_.v_div.resize(n);
  batch_.adv_task.resize(n);
  batch_.adv_div.resize(n);
  batch_.ret_task.resize(n);
  batch_.ret_div.resize(n);
  feat_batch_.clear();
  feat_batch_.reserve(n);

  double sum_r_task = 0.0, sum_r_div = 0.0;
  int episodes = 0;
  NetWorkspace ws, cws;
  Vec vals_t(horizon + 1), vals_d(horizon + 1);
  std::vector<std::uint8_t> dones(horizon);
  Vec rews_t(horizon), rews_d(horizon);
  Vec adv(horizon), ret(horizon);

  const bool zero_task = method_ == Method::div_only;

  for (int e = 0; e < n_envs; ++e) {
    auto& env = envs_[e];
    for (int t = 0; t < horizon; ++t) {
      const int k = e * horizon + t;
      const Vec& s = env_obs_[e];
      const Vec& z = env_skill_[e];
      ActResult ar;
      try {
        ar = policy_.act(theta_, s, z, action_rng_, ws);
      } catch (const std::exception& ex) {
        throw NumericalFault(ex.what());
      }
      const double vt = task_critic_.eval(s, z, cws);
      const double vd = div_critic_.eval(s, z, cws);

      Vec f0 = env.diversity_features();
      StepResult sr = env.step(ar.action);
      if (sr.info.cause == Termination::fault)
        throw NumericalFault("environment produced non-finite state");
      Vec f1 = env.diversity_features();
      const double r_div =
          intrinsic_ ? intrinsic_->reward(f0, f1, z) : 0.0;
      const double r_task = zero_task ? 0.0 : sr.r_task;

      batch_.obs[k] = s;
      batch_.z[k] = z;
      batch_.act[k] = ar.action;
      batch_.logp_old[k] = ar.log_prob;
      batch_.r_task[k] = r_task;
      batch_.r_div[k] = r_div;
      batch_.done[k] = sr.done ? 1 : 0;
      batch_.v_task[k] = vt;
      batch_.v_div[k] = vd;
      if (intrinsic_)
        feat_batch_.push_back({std::move(f0), std::move(f1), z});

      sum_r_task += sr.r_task;
      sum_r_div += r_div;

      if (sr.done) {
        ep_ret_task_[e] += sr.r_task;
        ep_ret_div_[e] += r_div;
        win_obstacles_[win_pos_] = sr.info.obstacles_passed;
        win_ret_task_[win_pos_] = ep_ret_task_[e];
        win_ret_div_[win_pos_] = ep_ret_div_[e];
        win_pos_ = (win_pos_ + 1) % cfg_.metric_window;
        win_count_ = std::min(win_count_ + 1, cfg_.metric_window);
        episodes += 1;
        episodes_done_total_ += 1;
        ep_ret_task_[e] = 0.0;
        ep_ret_div_[e] = 0.0;
        env_skill_[e] = sample_skill();
        Vec o = env.reset(env_rng_, env_skill_[e]);
        env_obs_[e].assign(o.begin(), o.begin() + ObstacleCourse::kObsDim);
      } else {
        ep_ret_task_[e] += sr.r_task;
        ep_ret_div_[e] += r_div;
        Vec o = env.observe(env_rng_);
        env_obs_[e].assign(o.begin(), o.begin() + ObstacleCourse::kObsDim);
      }
    }
    // bootstrap values from the (possibly reset) current obs; the done flag
    // masks them out where the episode ended at the boundary
    const double boot_t = task_critic_.eval(env_obs_[e], env_skill_[e], cws);
    const double boot_d = div_critic_.eval(env_obs_[e], env_skill_[e], cws);
    for (int t = 0; t < horizon; ++t) {
      const int k = e * horizon + t;
      rews_t[t] = batch_.r_task[k];
      rews_d[t] = batch_.r_div[k];
      dones[t] = batch_.done[k];
      vals_t[t] = batch_.v_task[k];
      vals_d[t] = batch_.v_div[k];
    }
    vals_t[horizon] = boot_t;
    vals_d[horizon] = boot_d;
    gae(rews_t, vals_t, dones, cfg_.ppo.gamma, cfg_.ppo.gae_lambda, adv, ret);
    for (int t = 0; t < horizon; ++t) {
      batch_.adv_task[e * horizon + t] = adv[t];
      batch_.ret_task[e * horizon + t] = ret[t];
    }
    gae(rews_d, vals_d, dones, cfg_.ppo.gamma, cfg_.ppo.gae_lambda, adv, ret);
    for (int t = 0; t < horizon; ++t) {
      batch_.adv_div[e * horizon + t] = adv[t];
      batch_.ret_div[e * horizon + t] = ret[t];
    }
  }

  stats_.mean_r_task = sum_r_task / (n_envs * horizon);
  stats_.mean_r_div = sum_r_div / (n_envs * horizon);
  stats_.episodes_done = episodes;
}

void Trainer::train_iteration() {
  collect();

  // Algorithm order: representation + multiplier first, then PPO, then lambda.
  if (intrinsic_) intrinsic_->update(feat_batch_);

  const bool adaptive = !lambda_.fixed;
  PpoDiagnostics diag =
      ppo_update(policy_, theta_, theta_adam_, task_critic_, div_critic_,
                 batch_, lambda_.lambda, cfg_.ppo, update_rng_, adaptive);

  double meta = 0.0;
  if (adaptive) {
    meta = lambda_grad(diag.snapshot);
    if (!std::isfinite(meta)) throw NumericalFault("non-finite meta-gradient");
  }
  lambda_step(lambda_, meta);

  iter_ += 1;
  stats_.iteration = iter_;
  stats_.lambda = lambda_.lambda;
  stats_.kappa = intrinsic_ ? intrinsic_->kappa() : 0.0;
  stats_.violation = intrinsic_ ? intrinsic_->last_violation() : 0.0;
  stats_.surrogate = diag.surrogate;
  stats_.vloss_task = diag.vloss_task;
  stats_.vloss_div = diag.vloss_div;
  stats_.entropy = diag.entropy;
  stats_.meta_grad = meta;
  double mo = 0.0, mrt = 0.0, mrd = 0.0;
  for (int i = 0; i < win_count_; ++i) {
    mo += win_obstacles_[i];
    mrt += win_ret_task_[i];
    mrd += win_ret_div_[i];
  }
  if (win_count_ > 0) {
    mo /= win_count_;
    mrt /= win_count_;
    mrd /= win_count_;
  }
  stats_.obstacles_passed = mo;
  stats_.ep_return_task = mrt;
  stats_.ep_return_div = mrd;
}

std::string Trainer::metrics_header() {
  return "# sdax metrics v1\n"
         "iteration,mean_r_task,mean_r_div,lambda,kappa,surrogate,vloss_task,"
         "vloss_div,entropy,obstacles_passed,ep_return_task,ep_return_div,"
         "episodes_done,meta_grad,violation\n";
}

std::string Trainer::metrics_row(const IterStats& s) {
  char buf[640];
  std::snprintf(buf, sizeof(buf),
                "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                "%.17g,%.17g,%d,%.17g,%.17g\n",
                s.iteration, s.mean_r_task, s.mean_r_div, s.lambda, s.kappa,
                s.surrogate, s.vloss_task, s.vloss_div, s.entropy,
                s.obstacles_passed, s.ep_return_task, s.ep_return_div,
                s.episodes_done, s.meta_grad, s.violation);
  return buf;
}

Checkpoint Trainer::make_checkpoint() const {
  Checkpoint ck;
  ck.cfg = cfg_;
  ck.seed = seed_;
  ck.iteration = iter_;
  ck.theta = theta_;
  ck.psi_task = task_critic_.params;
  ck.psi_div = div_critic_.params;
  ck.lambda = lambda_;
  if (const auto* m = dynamic_cast<const Metra*>(intrinsic_.get())) {
    ck.phi = m->phi_params();
    ck.kappa = m->kappa();
  } else if (const auto* d = dynamic_cast<const Diayn*>(intrinsic_.get())) {
    ck.phi = d->params();
  } else if (const auto* r = dynamic_cast<const Rnd*>(intrinsic_.get())) {
    ck.rnd_target = r->target_params();
    ck.rnd_predictor = r->predictor_params();
  }
  return ck;
}

void Trainer::run(const std::string& metrics_path, const std::string& ckpt_dir,
                  const std::function<bool(const IterStats&)>& on_iter) {
  std::ofstream metrics;
  if (!metrics_path.empty()) {
    std::filesystem::path p(metrics_path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    metrics.open(metrics_path);
    if (!metrics)
      throw std::runtime_error("cannot write metrics: " + metrics_path);
    metrics << metrics_header();
  }
  if (!ckpt_dir.empty()) std::filesystem::create_directories(ckpt_dir);

  auto checkpoint_now = [&](int it) {
    if (ckpt_dir.empty()) return;
    save_checkpoint(make_checkpoint(),
                    ckpt_dir + "/ckpt_" + std::to_string(it) + ".json");
  };

  try {
    for (int i = 0; i < cfg_.iterations; ++i) {
      train_iteration();
      if (metrics) metrics << metrics_row(stats_);
      if (iter_ % cfg_.checkpoint_every == 0) checkpoint_now(iter_);
      if (on_iter && !on_iter(stats_)) break;
    }
  } catch (const NumericalFault&) {
    // checkpoint what we have, record, and bubble up for the exit code
    if (metrics) metrics << metrics_row(stats_);
    checkpoint_now(iter_);
    throw;
  }
  if (ckpt_dir.empty()) return;
  if (iter_ % cfg_.checkpoint_every != 0) checkpoint_now(iter_);
}

}  // namespace sdax
