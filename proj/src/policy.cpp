#include "sdax/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sdax {

namespace {
constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)
}

GaussianPolicy::GaussianPolicy(int obs_dim, int skill_dim, int action_dim,
                               const std::vector<int>& hidden, Activation act)
    : obs_dim_(obs_dim), skill_dim_(skill_dim), action_dim_(action_dim) {
  std::vector<LayerSpec> layers;
  int in = obs_dim + skill_dim;
  for (int h : hidden) {
    layers.push_back({in, h, act});
    in = h;
  }
  layers.push_back({in, action_dim, Activation::identity});
  net_ = Net(std::move(layers));
}

Vec GaussianPolicy::init_params(Rng& rng) const {
  Vec p = net_.init_params(rng, 0.01);
  p.resize(param_count(), 0.0);  // log_std = 0
  return p;
}

void GaussianPolicy::stack_input(std::span<const double> s,
                                 std::span<const double> z, Vec& buf) const {
  buf.clear();
  buf.insert(buf.end(), s.begin(), s.end());
  buf.insert(buf.end(), z.begin(), z.end());
}

double GaussianPolicy::sigma(std::span<const double> params, int i) const {
  const double ls = std::clamp(params[log_std_offset() + i], kLogStdMin, kLogStdMax);
  return std::exp(ls);
}

void GaussianPolicy::mean(std::span<const double> params,
                          std::span<const double> s, std::span<const double> z,
                          NetWorkspace& ws, Vec& mu) const {
  Vec in;
  stack_input(s, z, in);
  net_.forward(params.first(net_.param_count()), in, ws);
  mu = net_.output(ws);
}

ActResult GaussianPolicy::act(std::span<const double> params,
                              std::span<const double> s,
                              std::span<const double> z, Rng& rng,
                              NetWorkspace& ws) const {
  Vec mu;
  mean(params, s, z, ws, mu);
  ActResult res;
  res.action.resize(action_dim_);
  for (int i = 0; i < action_dim_; ++i) {
    if (!std::isfinite(mu[i]))
      throw std::runtime_error("policy produced non-finite mean");
    res.action[i] = mu[i] + sigma(params, i) * rng.normal();
  }
  res.log_prob = log_prob_cached(params, ws, res.action);
  return res;
}

double GaussianPolicy::log_prob_cached(std::span<const double> params,
                                       const NetWorkspace& ws,
                                       std::span<const double> a) const {
  const Vec& mu = net_.output(ws);
  double lp = 0.0;
  for (int i = 0; i < action_dim_; ++i) {
    const double ls =
        std::clamp(params[log_std_offset() + i], kLogStdMin, kLogStdMax);
    const double sd = std::exp(ls);
    const double d = (a[i] - mu[i]) / sd;
    lp += -0.5 * d * d - ls - 0.5 * kLog2Pi;
  }
  return lp;
}

double GaussianPolicy::log_prob(std::span<const double> params,
                                std::span<const double> s,
                                std::span<const double> z,
                                std::span<const double> a,
                                NetWorkspace& ws) const {
  Vec mu;
  mean(params, s, z, ws, mu);
  return log_prob_cached(params, ws, a);
}

void GaussianPolicy::backward_heads(std::span<const double> params,
                                    const NetWorkspace& ws,
                                    std::span<const double> cot_mean,
                                    std::span<const double> cot_log_std,
                                    std::span<double> grad) const {
  net_.backward(params.first(net_.param_count()), ws, cot_mean,
                grad.first(net_.param_count()));
  for (int i = 0; i < action_dim_; ++i)
    grad[log_std_offset() + i] += cot_log_std[i];
}

void GaussianPolicy::log_prob_grad(std::span<const double> params,
                                   std::span<const double> s,
                                   std::span<const double> z,
                                   std::span<const double> a,
                                   std::span<double> grad,
                                   NetWorkspace& ws) const {
  Vec mu;
  mean(params, s, z, ws, mu);
  Vec cot_mu(action_dim_), cot_ls(action_dim_);
  for (int i = 0; i < action_dim_; ++i) {
    const double sd = sigma(params, i);
    const double d = (a[i] - mu[i]) / sd;
    cot_mu[i] = d / sd;           // d logp / d mu
    cot_ls[i] = d * d - 1.0;      // d logp / d log_std
  }
  backward_heads(params, ws, cot_mu, cot_ls, grad);
}

double GaussianPolicy::entropy(std::span<const double> params) const {
  double h = 0.0;
  for (int i = 0; i < action_dim_; ++i) {
    const double ls =
        std::clamp(params[log_std_offset() + i], kLogStdMin, kLogStdMax);
    h += ls + 0.5 * (1.0 + kLog2Pi);
  }
  return h;
}

void GaussianPolicy::clamp_log_std(std::span<double> params) const {
  for (int i = 0; i < action_dim_; ++i) {
    double& ls = params[log_std_offset() + i];
    ls = std::clamp(ls, kLogStdMin, kLogStdMax);
  }
}

}  // namespace sdax
