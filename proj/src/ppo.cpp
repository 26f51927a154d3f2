#include "sdax/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdax/kernels.hpp"

namespace sdax {

void gae(std::span<const double> rewards, std::span<const double> values,
         std::span<const std::uint8_t> dones, double gamma, double lam,
         std::span<double> adv, std::span<double> ret) {
  const int n = static_cast<int>(rewards.size());
  if (static_cast<int>(values.size()) != n + 1 ||
      static_cast<int>(dones.size()) != n || static_cast<int>(adv.size()) != n)
    throw DimensionError("gae: length mismatch");
  double running = 0.0;
  for (int t = n - 1; t >= 0; --t) {
    const double not_done = dones[t] ? 0.0 : 1.0;
    const double delta =
        rewards[t] + gamma * values[t + 1] * not_done - values[t];
    running = delta + gamma * lam * not_done * running;
    adv[t] = running;
    ret[t] = adv[t] + values[t];
  }
}

CriticHead::CriticHead(int obs_dim, int skill_dim,
                       const std::vector<int>& hidden, Activation act,
                       Rng& rng) {
  std::vector<LayerSpec> layers;
  int in = obs_dim + skill_dim;
  for (int h : hidden) {
    layers.push_back({in, h, act});
    in = h;
  }
  layers.push_back({in, 1, Activation::identity});
  net = Net(std::move(layers));
  params = net.init_params(rng);
  adam = AdamState(params.size());
}

double CriticHead::eval(std::span<const double> s, std::span<const double> z,
                        NetWorkspace& ws) const {
  Vec in(s.begin(), s.end());
  in.insert(in.end(), z.begin(), z.end());
  net.forward(params, in, ws);
  return net.output(ws)[0];
}

Vec weighted_logp_grad_mean(const GaussianPolicy& policy, const Vec& theta,
                            const RolloutBatch& batch,
                            std::span<const double> weights) {
  Vec g(policy.param_count(), 0.0);
  Vec sample(policy.param_count());
  NetWorkspace ws;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (int i = 0; i < batch.size(); ++i) {
    std::fill(sample.begin(), sample.end(), 0.0);
    policy.log_prob_grad(theta, batch.obs[i], batch.z[i], batch.act[i], sample,
                         ws);
    kern::axpy(weights[i] * inv_n, sample.data(), g.data(),
               static_cast<int>(g.size()));
  }
  return g;
}

Vec theta_prime(const GaussianPolicy& policy, const Vec& theta,
                const RolloutBatch& batch, double alpha, double lambda) {
  Vec w(batch.size());
  for (int i = 0; i < batch.size(); ++i)
    w[i] = batch.adv_task[i] + lambda * batch.adv_div[i];
  Vec g = weighted_logp_grad_mean(policy, theta, batch, w);
  Vec out = theta;
  kern::axpy(alpha, g.data(), out.data(), static_cast<int>(out.size()));
  return out;
}

namespace {

// mean over idx of A * dlogpi at given params
Vec mean_weighted_grad_idx(const GaussianPolicy& policy, const Vec& theta,
                           const RolloutBatch& batch,
                           std::span<const int> idx, const Vec& weights) {
  Vec g(policy.param_count(), 0.0);
  Vec sample(policy.param_count());
  NetWorkspace ws;
  const double inv_m = 1.0 / static_cast<double>(idx.size());
  for (int i : idx) {
    std::fill(sample.begin(), sample.end(), 0.0);
    policy.log_prob_grad(theta, batch.obs[i], batch.z[i], batch.act[i], sample,
                         ws);
    kern::axpy(weights[i] * inv_m, sample.data(), g.data(),
               static_cast<int>(g.size()));
  }
  return g;
}

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

PpoDiagnostics ppo_update(const GaussianPolicy& policy, Vec& theta,
                          AdamState& theta_adam, CriticHead& task_critic,
                          CriticHead& div_critic, const RolloutBatch& batch,
                          double lambda, const PpoConfig& cfg, Rng& rng,
                          bool want_snapshot) {
  PpoDiagnostics diag;
  const int n = batch.size();
  if (n == 0) return diag;
  const int nmb = std::max(1, std::min(cfg.minibatches, n));

  Vec theta_pre;
  if (want_snapshot) theta_pre = theta;

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> final_mb;

  Vec mixed(n);
  for (int i = 0; i < n; ++i)
    mixed[i] = batch.adv_task[i] + lambda * batch.adv_div[i];

  Vec pgrad(policy.param_count());
  Vec sample(policy.param_count());
  Vec cgrad_t(task_critic.params.size());
  Vec cgrad_d(div_critic.params.size());
  NetWorkspace ws, cws;
  Vec cot_mu(policy.action_dim()), cot_ls(policy.action_dim());
  Vec norm_adv(n);

  int stat_count = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with our rng keeps the permutation sequence pinned
    for (int i = n - 1; i > 0; --i)
      std::swap(perm[i], perm[static_cast<int>(rng.below(i + 1))]);
    for (int mb = 0; mb < nmb; ++mb) {
      const int lo = static_cast<int>(static_cast<std::int64_t>(mb) * n / nmb);
      const int hi =
          static_cast<int>(static_cast<std::int64_t>(mb + 1) * n / nmb);
      const int m = hi - lo;
      if (m == 0) continue;
      std::span<const int> idx(perm.data() + lo, static_cast<std::size_t>(m));
      if (want_snapshot && epoch == cfg.epochs - 1 && mb == nmb - 1)
        final_mb.assign(idx.begin(), idx.end());

      // normalize mixed advantage within the minibatch
      double mean = 0.0;
      for (int i : idx) mean += mixed[i];
      mean /= m;
      double var = 0.0;
      for (int i : idx) var += (mixed[i] - mean) * (mixed[i] - mean);
      const double sd = std::sqrt(var / m) + 1e-8;
      for (int i : idx) norm_adv[i] = (mixed[i] - mean) / sd;

      std::fill(pgrad.begin(), pgrad.end(), 0.0);
      std::fill(cgrad_t.begin(), cgrad_t.end(), 0.0);
      std::fill(cgrad_d.begin(), cgrad_d.end(), 0.0);
      double surr = 0.0, vlt = 0.0, vld = 0.0;
      const double inv_m = 1.0 / m;

      for (int i : idx) {
        const double a = norm_adv[i];
        const double lp =
            policy.log_prob(theta, batch.obs[i], batch.z[i], batch.act[i], ws);
        const double ratio = std::exp(lp - batch.logp_old[i]);
        const double clipped =
            std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip);
        surr += std::min(ratio * a, clipped * a) * inv_m;
        // gradient of the clipped surrogate w.r.t. logp
        const bool clipped_out = (a >= 0.0 && ratio > 1.0 + cfg.clip) ||
                                 (a < 0.0 && ratio < 1.0 - cfg.clip);
        if (!clipped_out) {
          const double dl_dlogp = -ratio * a * inv_m;  // minimize -L
          const Vec& mu = policy.net().output(ws);
          for (int k = 0; k < policy.action_dim(); ++k) {
            const double sdk = policy.sigma(theta, k);
            const double d = (batch.act[i][k] - mu[k]) / sdk;
            cot_mu[k] = dl_dlogp * d / sdk;
            cot_ls[k] = dl_dlogp * (d * d - 1.0);
          }
          policy.backward_heads(theta, ws, cot_mu, cot_ls, pgrad);
        }
        // critics regress their own returns
        const double vt = task_critic.eval(batch.obs[i], batch.z[i], cws);
        vlt += 0.5 * (vt - batch.ret_task[i]) * (vt - batch.ret_task[i]) * inv_m;
        Vec vcot{cfg.value_coef * (vt - batch.ret_task[i]) * inv_m};
        task_critic.net.backward(task_critic.params, cws, vcot, cgrad_t);
        const double vd = div_critic.eval(batch.obs[i], batch.z[i], cws);
        vld += 0.5 * (vd - batch.ret_div[i]) * (vd - batch.ret_div[i]) * inv_m;
        vcot[0] = cfg.value_coef * (vd - batch.ret_div[i]) * inv_m;
        div_critic.net.backward(div_critic.params, cws, vcot, cgrad_d);
      }
      // entropy bonus: d(-coef*H)/d(log_std) = -coef per dimension
      for (int k = 0; k < policy.action_dim(); ++k)
        pgrad[policy.log_std_offset() + k] -= cfg.entropy_coef;

      if (!all_finite(pgrad) || !std::isfinite(surr)) {
        diag.skipped = true;  // skip this minibatch, keep going
        continue;
      }
      adam_step(theta, pgrad, theta_adam, cfg.lr);
      policy.clamp_log_std(theta);
      adam_step(task_critic.params, cgrad_t, task_critic.adam, cfg.lr);
      adam_step(div_critic.params, cgrad_d, div_critic.adam, cfg.lr);

      diag.surrogate += surr;
      diag.vloss_task += vlt;
      diag.vloss_div += vld;
      stat_count += 1;
    }
  }
  if (stat_count > 0) {
    diag.surrogate /= stat_count;
    diag.vloss_task /= stat_count;
    diag.vloss_div /= stat_count;
  }
  diag.entropy = policy.entropy(theta);

  if (want_snapshot && !final_mb.empty()) {
    diag.snapshot.alpha = cfg.lr;
    if (cfg.per_sample_dot) {
      // mean_i A_task_i A_div_i <dlogpi(theta_post, i), dlogpi(theta_pre, i)>
      Vec g_pre(policy.param_count()), g_post(policy.param_count());
      double acc = 0.0;
      const double inv_m = 1.0 / static_cast<double>(final_mb.size());
      for (int i : final_mb) {
        std::fill(g_pre.begin(), g_pre.end(), 0.0);
        std::fill(g_post.begin(), g_post.end(), 0.0);
        policy.log_prob_grad(theta_pre, batch.obs[i], batch.z[i], batch.act[i],
                             g_pre, ws);
        policy.log_prob_grad(theta, batch.obs[i], batch.z[i], batch.act[i],
                             g_post, ws);
        acc += batch.adv_task[i] * batch.adv_div[i] * inv_m *
               kern::dot(g_post.data(), g_pre.data(),
                         static_cast<int>(g_pre.size()));
      }
      diag.snapshot.has_per_sample = true;
      diag.snapshot.per_sample_dot = acc;
    } else {
      diag.snapshot.g_div = mean_weighted_grad_idx(policy, theta_pre, batch,
                                                   final_mb, batch.adv_div);
      diag.snapshot.g_task_after = mean_weighted_grad_idx(
          policy, theta, batch, final_mb, batch.adv_task);
    }
  }
  return diag;
}

}  // namespace sdax
