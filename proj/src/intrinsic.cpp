#include "sdax/intrinsic.hpp"

#include <algorithm>
#include <cmath>

#include "sdax/kernels.hpp"

namespace sdax {

namespace {

std::vector<LayerSpec> mlp_layers(int in, const std::vector<int>& hidden,
                                  int out, Activation act) {
  std::vector<LayerSpec> layers;
  for (int h : hidden) {
    layers.push_back({in, h, act});
    in = h;
  }
  layers.push_back({in, out, Activation::identity});
  return layers;
}

}  // namespace

Metra::Metra(int feature_dim, int skill_dim, const MetraConfig& cfg, Rng& rng)
    : net_(mlp_layers(feature_dim, cfg.hidden, skill_dim, Activation::relu)),
      cfg_(cfg),
      kappa_(cfg.kappa_init) {
  params_ = net_.init_params(rng);
  adam_ = AdamState(params_.size());
}

double Metra::reward(const Vec& f, const Vec& f1, const Vec& z) const {
  NetWorkspace ws;
  net_.forward(params_, f, ws);
  Vec p0 = net_.output(ws);
  net_.forward(params_, f1, ws);
  const Vec& p1 = net_.output(ws);
  double r = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) r += (p1[i] - p0[i]) * z[i];
  return r;
}

void Metra::update(std::span<const FeatureTransition> batch) {
  if (batch.empty()) return;
  const int sd = net_.output_dim();
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  Vec grad(params_.size(), 0.0);  // gradient of -J (for the minimizer)
  double mean_min_term = 0.0;
  double violation = 0.0;
  NetWorkspace ws0, ws1;
  Vec cot(sd);
  for (const auto& tr : batch) {
    net_.forward(params_, tr.f, ws0);
    net_.forward(params_, tr.f1, ws1);
    const Vec& p0 = net_.output(ws0);
    const Vec& p1 = net_.output(ws1);
    double nrm2 = 0.0;
    for (int i = 0; i < sd; ++i) {
      const double d = p1[i] - p0[i];
      nrm2 += d * d;
    }
    const double slack = 1.0 - nrm2;
    const bool active = slack < cfg_.eps;
    mean_min_term += std::min(cfg_.eps, slack) * inv_n;
    violation += std::max(0.0, nrm2 - 1.0) * inv_n;
    // d/d phi(f') of [dphi^T z + kappa*min(eps, 1-||dphi||^2)], negated
    for (int i = 0; i < sd; ++i) {
      const double d = p1[i] - p0[i];
      cot[i] = -inv_n * (tr.z[i] - (active ? 2.0 * kappa_ * d : 0.0));
    }
    net_.backward(params_, ws1, cot, grad);
    for (int i = 0; i < sd; ++i) cot[i] = -cot[i];
    net_.backward(params_, ws0, cot, grad);
  }
  adam_step(params_, grad, adam_, cfg_.phi_lr);
  kappa_ = std::max(0.0, kappa_ - cfg_.kappa_lr * mean_min_term);
  last_violation_ = violation;
}

Diayn::Diayn(int feature_dim, int skill_dim, const DiaynConfig& cfg, Rng& rng)
    : net_(mlp_layers(feature_dim, cfg.hidden, skill_dim, Activation::relu)),
      cfg_(cfg) {
  params_ = net_.init_params(rng);
  adam_ = AdamState(params_.size());
}

Vec Diayn::predict(const Vec& f) const {
  NetWorkspace ws;
  net_.forward(params_, f, ws);
  return net_.output(ws);
}

double Diayn::reward(const Vec& /*f*/, const Vec& f1, const Vec& z) const {
  // log N(z; mu(f'), I) - log N(z; 0, I)
  const Vec mu = predict(f1);
  double r = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double d = z[i] - mu[i];
    r += -0.5 * d * d + 0.5 * z[i] * z[i];
  }
  return r;
}

void Diayn::update(std::span<const FeatureTransition> batch) {
  if (batch.empty()) return;
  const int sd = net_.output_dim();
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  Vec grad(params_.size(), 0.0);
  NetWorkspace ws;
  Vec cot(sd);
  for (const auto& tr : batch) {
    net_.forward(params_, tr.f1, ws);
    const Vec& mu = net_.output(ws);
    for (int i = 0; i < sd; ++i) cot[i] = inv_n * (mu[i] - tr.z[i]);
    net_.backward(params_, ws, cot, grad);
  }
  adam_step(params_, grad, adam_, cfg_.lr);
}

Rnd::Rnd(int feature_dim, const RndConfig& cfg, Rng& rng)
    : net_(mlp_layers(feature_dim, cfg.hidden, cfg.embed_dim, Activation::relu)),
      cfg_(cfg) {
  target_params_ = net_.init_params(rng);
  predictor_params_ = net_.init_params(rng);
  adam_ = AdamState(predictor_params_.size());
}

double Rnd::reward(const Vec& /*f*/, const Vec& f1, const Vec& /*z*/) const {
  NetWorkspace ws;
  net_.forward(target_params_, f1, ws);
  Vec t = net_.output(ws);
  net_.forward(predictor_params_, f1, ws);
  const Vec& p = net_.output(ws);
  double b = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double d = p[i] - t[i];
    b += d * d;
  }
  return b;
}

void Rnd::update(std::span<const FeatureTransition> batch) {
  if (batch.empty()) return;
  const int ed = net_.output_dim();
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  Vec grad(predictor_params_.size(), 0.0);
  NetWorkspace wst, wsp;
  Vec cot(ed);
  for (const auto& tr : batch) {
    net_.forward(target_params_, tr.f1, wst);
    net_.forward(predictor_params_, tr.f1, wsp);
    const Vec& t = net_.output(wst);
    const Vec& p = net_.output(wsp);
    for (int i = 0; i < ed; ++i) cot[i] = inv_n * 2.0 * (p[i] - t[i]);
    net_.backward(predictor_params_, wsp, cot, grad);
  }
  adam_step(predictor_params_, grad, adam_, cfg_.lr);
}

}  // namespace sdax
