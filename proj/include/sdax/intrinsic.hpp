#pragma once
// Diversity / exploration reward providers. All operate on the environment's
// configured diversity-feature slice, not on full observations.

#include <memory>
#include <span>
#include <vector>

#include "sdax/net.hpp"
#include "sdax/rng.hpp"

namespace sdax {

struct FeatureTransition {
  Vec f;   // features(s)
  Vec f1;  // features(s')
  Vec z;   // episode skill
};

class IntrinsicReward {
 public:
  virtual ~IntrinsicReward() = default;
  virtual double reward(const Vec& f, const Vec& f1, const Vec& z) const = 0;
  virtual void update(std::span<const FeatureTransition> batch) = 0;
  virtual double kappa() const { return 0.0; }
  virtual double last_violation() const { return 0.0; }
};

struct MetraConfig {
  std::vector<int> hidden = {64, 64};
  double eps = 1e-3;
  double kappa_init = 30.0;
  double phi_lr = 1e-4;
  double kappa_lr = 1e-3;
};

// METRA surrogate: r = (phi(f') - phi(f))^T z, with the adjacent-state
// 1-Lipschitz-style constraint enforced by dual gradient descent on kappa.
class Metra : public IntrinsicReward {
 public:
  Metra(int feature_dim, int skill_dim, const MetraConfig& cfg, Rng& rng);

  double reward(const Vec& f, const Vec& f1, const Vec& z) const override;
  void update(std::span<const FeatureTransition> batch) override;
  double kappa() const override { return kappa_; }
  // mean over the last update batch of max(0, ||dphi||^2 - 1)
  double last_violation() const override { return last_violation_; }

  const Vec& phi_params() const { return params_; }
  Vec& mutable_phi_params() { return params_; }
  const Net& phi_net() const { return net_; }
  AdamState& adam() { return adam_; }
  void set_kappa(double k) { kappa_ = k; }

 private:
  Net net_;
  Vec params_;
  AdamState adam_;
  MetraConfig cfg_;
  double kappa_;
  double last_violation_ = 0.0;
};

struct DiaynConfig {
  std::vector<int> hidden = {64, 64};
  double lr = 1e-4;
};

// Continuous-skill DIAYN surrogate: discriminator regresses z from features;
// r = log N(z; mu(f'), I) - log N(z; 0, I).
class Diayn : public IntrinsicReward {
 public:
  Diayn(int feature_dim, int skill_dim, const DiaynConfig& cfg, Rng& rng);

  double reward(const Vec& f, const Vec& f1, const Vec& z) const override;
  void update(std::span<const FeatureTransition> batch) override;

  const Vec& params() const { return params_; }
  Vec& mutable_params() { return params_; }
  const Net& net() const { return net_; }
  AdamState& adam() { return adam_; }
  Vec predict(const Vec& f) const;

 private:
  Net net_;
  Vec params_;
  AdamState adam_;
  DiaynConfig cfg_;
};

struct RndConfig {
  std::vector<int> hidden = {64, 64};
  int embed_dim = 8;
  double lr = 1e-4;
};

// Random network distillation: bonus = ||predictor(f') - target(f')||^2,
// target frozen at init.
class Rnd : public IntrinsicReward {
 public:
  Rnd(int feature_dim, const RndConfig& cfg, Rng& rng);

  double reward(const Vec& f, const Vec& f1, const Vec& z) const override;
  void update(std::span<const FeatureTransition> batch) override;

  const Vec& target_params() const { return target_params_; }
  const Vec& predictor_params() const { return predictor_params_; }
  Vec& mutable_predictor_params() { return predictor_params_; }
  Vec& mutable_target_params() { return target_params_; }
  AdamState& adam() { return adam_; }

 private:
  Net net_;  // shared architecture for target and predictor
  Vec target_params_, predictor_params_;
  AdamState adam_;
  RndConfig cfg_;
};

}  // namespace sdax
