#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "sdax/bilevel.hpp"
#include "sdax/ppo.hpp"

using namespace sdax;

TEST_CASE("lambda gradient is alpha times the snapshot inner product") {
  GradSnapshot s;
  s.alpha = 0.0005;
  s.g_div = {1.0, 0.0, 2.0};
  s.g_task_after = {3.0, 5.0, -1.0};
  CHECK(lambda_grad(s) == doctest::Approx(0.0005 * 1.0).epsilon(1e-12));

  // aligned unit-norm gradients give exactly +alpha
  GradSnapshot a;
  a.alpha = 0.0005;
  a.g_div = {0.6, 0.8};
  a.g_task_after = {0.6, 0.8};
  CHECK(lambda_grad(a) == doctest::Approx(0.0005).epsilon(1e-12));

  // anti-aligned flips the sign
  for (auto& v : a.g_task_after) v = -v;
  CHECK(lambda_grad(a) == doctest::Approx(-0.0005).epsilon(1e-12));

  GradSnapshot bad;
  bad.g_div = {1.0};
  bad.g_task_after = {1.0, 2.0};
  CHECK_THROWS(lambda_grad(bad));
}

TEST_CASE("precomputed per-sample dot bypasses the vector pair") {
  GradSnapshot s;
  s.alpha = 0.1;
  s.has_per_sample = true;
  s.per_sample_dot = -2.5;
  s.g_div = {9.0};  // stale vectors must be ignored
  s.g_task_after = {9.0, 9.0};
  CHECK(lambda_grad(s) == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("lambda ascends its gradient and respects the clamp") {
  LambdaState st;
  CHECK(st.lambda == 10.0);
  lambda_step(st, 1.0);
  CHECK(st.lambda == doctest::Approx(10.0 + 1e-2).epsilon(1e-12));
  CHECK(st.last_grad == 1.0);

  st.lambda = 100.0;
  lambda_step(st, 50.0);
  CHECK(st.lambda == 100.0);  // upper clamp

  st.lambda = 1e-4;
  lambda_step(st, -50.0);
  CHECK(st.lambda == 1e-4);  // lower clamp
}

TEST_CASE("fixed mode freezes lambda but still records the gradient") {
  LambdaState st;
  st.fixed = true;
  st.lambda = 0.1;
  lambda_step(st, 7.0);
  CHECK(st.lambda == 0.1);
  CHECK(st.last_grad == 7.0);
}

TEST_CASE("repeated steps follow the linear recursion") {
  LambdaState st;
  st.lambda = 1.0;
  double expect = 1.0;
  for (int i = 0; i < 20; ++i) {
    const double g = 0.3 * (i % 5) - 0.4;
    lambda_step(st, g);
    expect = std::clamp(expect + st.beta * g, st.lambda_min, st.lambda_max);
    CHECK(st.lambda == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("meta-gradient matches finite differences on a tractable problem") {
  // One-state 1-D problem. The inner update is the actual theta_prime; the
  // outer objective J(lambda) = E_{a~pi_theta'(lambda)}[r_task(a)] is
  // estimated on a large common-random-numbers batch.
  GaussianPolicy pi(1, 1, 1, {}, Activation::identity);
  Rng init(1);
  Vec theta = pi.init_params(init);
  theta[0] = 0.8;   // weight on obs
  theta[1] = 0.3;   // weight on z
  theta[2] = 0.55;  // bias; mean sits 0.5 away from the task optimum
  theta[3] = 0.0;   // log_std = 0

  const Vec s = {1.0}, z = {0.5};
  // r_task(a) = -(a - 1)^2, r_div(a) = a
  auto r_task = [](double a) { return -(a - 1.0) * (a - 1.0); };
  auto r_div = [](double a) { return a; };

  const int n = 40000;
  RolloutBatch b;
  NetWorkspace ws;
  Rng rng(2);
  double mt = 0.0, md = 0.0;
  Vec rt(n), rd(n);
  for (int i = 0; i < n; ++i) {
    auto out = pi.act(theta, s, z, rng, ws);
    b.obs.push_back(s);
    b.z.push_back(z);
    b.act.push_back(out.action);
    b.logp_old.push_back(out.log_prob);
    b.done.push_back(1);
    rt[i] = r_task(out.action[0]);
    rd[i] = r_div(out.action[0]);
    mt += rt[i] / n;
    md += rd[i] / n;
  }
  for (int i = 0; i < n; ++i) {
    b.adv_task.push_back(rt[i] - mt);  // baseline-subtracted
    b.adv_div.push_back(rd[i] - md);
    b.ret_task.push_back(rt[i]);
    b.ret_div.push_back(rd[i]);
    b.r_task.push_back(rt[i]);
    b.r_div.push_back(rd[i]);
  }

  // small inner step: the meta-gradient is a first-order approximation
  const double alpha = 0.004;
  // closed-form outer objective: a ~ N(mu', sigma'^2) under theta'(lambda),
  // E[-(a-1)^2] = -(mu'-1)^2 - sigma'^2
  auto outer = [&](double lambda) {
    Vec tp = theta_prime(pi, theta, b, alpha, lambda);
    Vec mu;
    pi.mean(tp, s, z, ws, mu);
    const double sig = pi.sigma(tp, 0);
    return -(mu[0] - 1.0) * (mu[0] - 1.0) - sig * sig;
  };

  const double lam = 2.0, h = 0.02;
  const double fd = (outer(lam + h) - outer(lam - h)) / (2 * h);

  GradSnapshot snap;
  snap.alpha = alpha;
  snap.g_div = weighted_logp_grad_mean(pi, theta, b, b.adv_div);
  Vec tp = theta_prime(pi, theta, b, alpha, lam);
  snap.g_task_after = weighted_logp_grad_mean(pi, tp, b, b.adv_task);
  const double mg = lambda_grad(snap);

  CHECK(std::abs(mg - fd) <= 5e-2 * std::max(std::abs(fd), 1e-3));
}
