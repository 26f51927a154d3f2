#pragma once
// Minimal feed-forward network over flat parameter vectors, with exact
// reverse-mode gradients. No graph machinery: the architecture is a fixed
// affine+activation stack and the gradient is hand-derived per layer.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdax/rng.hpp"

namespace sdax {

using Vec = std::vector<double>;

enum class Activation { tanh, elu, relu, identity };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

struct LayerSpec {
  int in_dim = 0;
  int out_dim = 0;
  Activation act = Activation::identity;
};

// Forward-pass scratch; owns the cached activations backward() consumes.
// One per worker when evaluating concurrently.
struct NetWorkspace {
  std::vector<Vec> pre;   // pre-activation per layer
  std::vector<Vec> post;  // post-activation per layer
  Vec input;
};

class Net {
 public:
  Net() = default;
  explicit Net(std::vector<LayerSpec> layers);

  int input_dim() const { return layers_.front().in_dim; }
  int output_dim() const { return layers_.back().out_dim; }
  int param_count() const { return param_count_; }
  const std::vector<LayerSpec>& layers() const { return layers_; }

  // Flat-vector layout: per layer, weights (row-major out x in) then bias.
  int weight_offset(int layer) const { return w_off_[layer]; }
  int bias_offset(int layer) const { return b_off_[layer]; }

  void forward(std::span<const double> params, std::span<const double> input,
               NetWorkspace& ws) const;
  const Vec& output(const NetWorkspace& ws) const { return ws.post.back(); }

  // Accumulates d(cot . output)/d(params) into param_grad. Requires the
  // workspace of a preceding forward() on the same (params, input).
  // When input_grad is non-empty, also accumulates d/d(input).
  void backward(std::span<const double> params, const NetWorkspace& ws,
                std::span<const double> cot, std::span<double> param_grad,
                std::span<double> input_grad = {}) const;

  // Scaled random init: weight rows drawn N(0, 1/in_dim), biases zero.
  // The final layer is additionally scaled by final_scale.
  Vec init_params(Rng& rng, double final_scale = 1.0) const;

 private:
  std::vector<LayerSpec> layers_;
  std::vector<int> w_off_, b_off_;
  int param_count_ = 0;
};

struct AdamState {
  Vec m, v;
  std::int64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

// One bias-corrected Adam step on params, minimizing along grad.
void adam_step(std::span<double> params, std::span<const double> grad,
               AdamState& state, double lr);

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sdax
