#include "sdax/evaluate.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sdax/intrinsic.hpp"

namespace sdax {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::none: return "none";
    case Termination::timeout: return "timeout";
    case Termination::fall: return "fall";
    case Termination::bar_crash: return "bar_crash";
    case Termination::wall_crash: return "wall_crash";
    case Termination::blocked_timeout: return "blocked_timeout";
    case Termination::fault: return "fault";
  }
  return "?";
}

GaussianPolicy policy_from_checkpoint(const Checkpoint& ck) {
  const Activation act = activation_from_string(ck.cfg.policy_activation);
  GaussianPolicy p(ObstacleCourse::kObsDim, ck.cfg.skill_dim, 4,
                   ck.cfg.policy_hidden, act);
  if (static_cast<int>(ck.theta.size()) != p.param_count())
    throw std::runtime_error("checkpoint/config mismatch: theta size");
  return p;
}

namespace {

std::unique_ptr<IntrinsicReward> intrinsic_from_checkpoint(const Checkpoint& ck,
                                                           int feat_dim) {
  Rng dummy(0);
  switch (ck.cfg.method_kind()) {
    case Method::sdax_metra:
    case Method::div_only: {
      auto m = std::make_unique<Metra>(feat_dim, ck.cfg.skill_dim,
                                       ck.cfg.metra, dummy);
      if (ck.phi.size() == m->phi_params().size()) {
        m->mutable_phi_params() = ck.phi;
        m->set_kappa(ck.kappa);
      }
      return m;
    }
    case Method::sdax_diayn: {
      auto d = std::make_unique<Diayn>(feat_dim, ck.cfg.skill_dim,
                                       ck.cfg.diayn, dummy);
      if (ck.phi.size() == d->params().size()) d->mutable_params() = ck.phi;
      return d;
    }
    case Method::rnd: {
      auto r = std::make_unique<Rnd>(feat_dim, ck.cfg.rnd, dummy);
      if (ck.rnd_target.size() == r->target_params().size()) {
        r->mutable_target_params() = ck.rnd_target;
        r->mutable_predictor_params() = ck.rnd_predictor;
      }
      return r;
    }
    case Method::task_only:
      return nullptr;
  }
  return nullptr;
}

}  // namespace

RolloutSummary evaluate_rollout(const Checkpoint& ck, const Vec& skill,
                                const std::string& csv_path) {
  if (static_cast<int>(skill.size()) != ck.cfg.skill_dim)
    throw std::runtime_error("skill dimension mismatch");
  GaussianPolicy policy = policy_from_checkpoint(ck);
  EnvConfig ecfg = ck.cfg.env;
  ecfg.noise = NoiseConfig{};   // evaluation is noise-free
  ecfg.spawn_jitter = 0.0;      // and deterministic
  ObstacleCourse env(ecfg);
  Rng rng(0);  // unused given the settings above
  Vec obs = env.reset(rng, skill);

  ObstacleCourse feat_probe(ecfg);
  auto intrinsic = intrinsic_from_checkpoint(ck, env.diversity_dim());

  std::ofstream csv;
  if (!csv_path.empty()) {
    std::filesystem::path p(csv_path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    csv.open(csv_path);
    csv << "t,x,z,vx,vz,body_angle,r_task,r_div,done\n";
  }

  RolloutSummary sum;
  NetWorkspace ws;
  Vec mu;
  while (!env.done()) {
    Vec s(obs.begin(), obs.begin() + ObstacleCourse::kObsDim);
    policy.mean(ck.theta, s, skill, ws, mu);
    Vec f0 = env.diversity_features();
    StepResult sr = env.step(mu);
    Vec f1 = env.diversity_features();
    const double r_div = intrinsic ? intrinsic->reward(f0, f1, skill) : 0.0;
    sum.episode_return_task += sr.r_task;
    sum.episode_return_div += r_div;
    sum.steps += 1;
    sum.obstacles_passed = sr.info.obstacles_passed;
    sum.cause = sr.info.cause;
    if (csv) {
      char buf[320];
      const auto& st = env.state();
      std::snprintf(buf, sizeof(buf),
                    "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                    sum.steps, st.x, st.height_z, st.vx, st.vz, st.body_angle,
                    sr.r_task, r_div, sr.done ? 1 : 0);
      csv << buf;
    }
    obs = env.observe(rng);
  }
  return sum;
}

CollapseResult evaluate_positive_collapse(const Checkpoint& ck, int n_skills,
                                          int n_repeats,
                                          std::uint64_t eval_seed,
                                          int min_obstacles) {
  CollapseResult res;
  res.per_repeat.reserve(n_repeats);
  for (int rep = 0; rep < n_repeats; ++rep) {
    Rng rng(split_seed(eval_seed, rep));
    int success = 0;
    for (int k = 0; k < n_skills; ++k) {
      Vec z(ck.cfg.skill_dim);
      for (auto& v : z) v = rng.normal();
      const RolloutSummary s = evaluate_rollout(ck, z);
      if (s.obstacles_passed >= min_obstacles) success += 1;
    }
    res.per_repeat.push_back(100.0 * success / n_skills);
  }
  double mean = 0.0;
  for (double v : res.per_repeat) mean += v;
  mean /= n_repeats;
  double var = 0.0;
  for (double v : res.per_repeat) var += (v - mean) * (v - mean);
  res.mean = mean;
  res.stddev = n_repeats > 1 ? std::sqrt(var / (n_repeats - 1)) : 0.0;
  return res;
}

}  // namespace sdax
