#include "sdax/bilevel.hpp"

#include <algorithm>
#include <stdexcept>

#include "sdax/kernels.hpp"

namespace sdax {

double lambda_grad(const GradSnapshot& snap) {
  if (snap.has_per_sample) return snap.alpha * snap.per_sample_dot;
  if (snap.g_div.size() != snap.g_task_after.size())
    throw std::runtime_error("lambda_grad: snapshot vectors differ in length");
  return snap.alpha * kern::dot(snap.g_task_after.data(), snap.g_div.data(),
                                static_cast<int>(snap.g_div.size()));
}

void lambda_step(LambdaState& state, double meta_grad) {
  state.last_grad = meta_grad;
  if (state.fixed) return;
  state.lambda = std::clamp(state.lambda + state.beta * meta_grad,
                            state.lambda_min, state.lambda_max);
}

}  // namespace sdax
