#include "sdax/net.hpp"

#include <cmath>

#include "sdax/kernels.hpp"

namespace sdax {

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::tanh;
  if (s == "elu") return Activation::elu;
  if (s == "relu") return Activation::relu;
  if (s == "identity") return Activation::identity;
  throw DimensionError("unknown activation: " + s);
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::tanh: return "tanh";
    case Activation::elu: return "elu";
    case Activation::relu: return "relu";
    case Activation::identity: return "identity";
  }
  return "identity";
}

namespace {

inline double act_fwd(Activation a, double x) {
  switch (a) {
    case Activation::tanh: return std::tanh(x);
    case Activation::elu: return x > 0.0 ? x : std::expm1(x);
    case Activation::relu: return x > 0.0 ? x : 0.0;
    case Activation::identity: return x;
  }
  return x;
}

// derivative expressed through pre (x) and post (y) values
inline double act_bwd(Activation a, double x, double y) {
  switch (a) {
    case Activation::tanh: return 1.0 - y * y;
    case Activation::elu: return x > 0.0 ? 1.0 : y + 1.0;
    case Activation::relu: return x > 0.0 ? 1.0 : 0.0;
    case Activation::identity: return 1.0;
  }
  return 1.0;
}

}  // namespace

Net::Net(std::vector<LayerSpec> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw DimensionError("net needs at least one layer");
  int off = 0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.in_dim < 1 || l.out_dim < 1)
      throw DimensionError("layer dims must be >= 1");
    if (i > 0 && l.in_dim != layers_[i - 1].out_dim)
      throw DimensionError("layer dims do not chain");
    w_off_.push_back(off);
    off += l.in_dim * l.out_dim;
    b_off_.push_back(off);
    off += l.out_dim;
  }
  param_count_ = off;
}

void Net::forward(std::span<const double> params, std::span<const double> input,
                  NetWorkspace& ws) const {
  if (static_cast<int>(input.size()) != input_dim())
    throw DimensionError("forward: input size mismatch");
  if (static_cast<int>(params.size()) != param_count_)
    throw DimensionError("forward: param size mismatch");
  ws.pre.resize(layers_.size());
  ws.post.resize(layers_.size());
  ws.input.assign(input.begin(), input.end());
  const double* x = ws.input.data();
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    ws.pre[i].resize(l.out_dim);
    ws.post[i].resize(l.out_dim);
    kern::matvec(params.data() + w_off_[i], x, params.data() + b_off_[i],
                 ws.pre[i].data(), l.out_dim, l.in_dim);
    for (int r = 0; r < l.out_dim; ++r)
      ws.post[i][r] = act_fwd(l.act, ws.pre[i][r]);
    x = ws.post[i].data();
  }
}

void Net::backward(std::span<const double> params, const NetWorkspace& ws,
                   std::span<const double> cot, std::span<double> param_grad,
                   std::span<double> input_grad) const {
  if (static_cast<int>(cot.size()) != output_dim())
    throw DimensionError("backward: cotangent size mismatch");
  if (static_cast<int>(param_grad.size()) != param_count_)
    throw DimensionError("backward: grad size mismatch");
  Vec delta(cot.begin(), cot.end());
  Vec next;
  for (int i = static_cast<int>(layers_.size()) - 1; i >= 0; --i) {
    const auto& l = layers_[i];
    for (int r = 0; r < l.out_dim; ++r)
      delta[r] *= act_bwd(l.act, ws.pre[i][r], ws.post[i][r]);
    const double* x = i == 0 ? ws.input.data() : ws.post[i - 1].data();
    kern::ger_acc(param_grad.data() + w_off_[i], delta.data(), x, l.out_dim,
                  l.in_dim);
    for (int r = 0; r < l.out_dim; ++r)
      param_grad[b_off_[i] + r] += delta[r];
    if (i > 0 || !input_grad.empty()) {
      next.assign(l.in_dim, 0.0);
      kern::matvec_t_acc(params.data() + w_off_[i], delta.data(), next.data(),
                         l.out_dim, l.in_dim);
      if (i == 0) {
        for (int k = 0; k < l.in_dim; ++k) input_grad[k] += next[k];
        return;
      }
      delta = next;
    }
  }
}

Vec Net::init_params(Rng& rng, double final_scale) const {
  Vec p(param_count_, 0.0);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    const double scale = (i + 1 == layers_.size() ? final_scale : 1.0) /
                         std::sqrt(static_cast<double>(l.in_dim));
    for (int k = 0; k < l.in_dim * l.out_dim; ++k)
      p[w_off_[i] + k] = scale * rng.normal();
  }
  return p;
}

void adam_step(std::span<double> params, std::span<const double> grad,
               AdamState& state, double lr) {
  if (params.size() != grad.size() || params.size() != state.m.size())
    throw DimensionError("adam_step: size mismatch");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

}  // namespace sdax
