#pragma once
// Balancing-parameter optimizer: the meta-gradient of the task objective
// w.r.t. lambda is alpha times the inner product of the post-update task
// policy-gradient and the pre-update diversity policy-gradient.

#include <span>

#include "sdax/net.hpp"

namespace sdax {

struct LambdaState {
  double lambda = 10.0;
  double beta = 1e-2;  // lambda step size
  double lambda_min = 1e-4;
  double lambda_max = 100.0;
  bool fixed = false;  // fixed-lambda ablation mode: lambda_step is a no-op
  double last_grad = 0.0;
};

struct GradSnapshot {
  Vec g_div;         // batch-mean A_div * dlogpi/dtheta at pre-update theta
  Vec g_task_after;  // batch-mean A_task * dlogpi/dtheta at post-update theta
  double alpha = 0.0;  // policy learning rate
  // per-sample dot-then-mean variant; overrides the vector pair when set
  bool has_per_sample = false;
  double per_sample_dot = 0.0;
};

double lambda_grad(const GradSnapshot& snap);

void lambda_step(LambdaState& state, double meta_grad);

}  // namespace sdax
