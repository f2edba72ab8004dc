#ifndef LTOS_MLP_HPP
#define LTOS_MLP_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ltos/rng.hpp"

namespace ltos {

enum class Activation : std::uint32_t { kIdentity = 0, kRelu = 1, kSoftmax = 2 };

struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;
  Activation act = Activation::kIdentity;
  std::size_t weight_offset = 0;  // row-major out x in
  std::size_t bias_offset = 0;

  bool operator==(const LayerShape&) const = default;
};

// Per-layer post-activation values from one forward pass; values[0] is the
// input. Backward reads only these, so a tape can be reused across calls.
struct Tape {
  std::vector<std::vector<double>> values;
  std::span<const double> output() const { return values.back(); }
};

enum class Init { kUniform, kNormal };

// Dense feedforward approximator. All parameters live in one flat vector
// (per layer: weights row-major, then biases) so optimizers, target blending
// and checkpoints work on a single buffer.
class Mlp {
 public:
  Mlp() = default;
  // sizes = {input, hidden..., output}; hidden layers use `hidden`, the last
  // layer uses `output`. Parameters start at zero.
  Mlp(std::span<const std::size_t> sizes, Activation hidden, Activation output);
  Mlp(std::initializer_list<std::size_t> sizes, Activation hidden, Activation output);

  // Zero biases; weights U(-1/sqrt(fan_in), 1/sqrt(fan_in)) or N(0, stddev).
  void initialize(Rng& rng, Init init = Init::kUniform, double stddev = 0.1);

  std::size_t input_size() const { return layers_.empty() ? 0 : layers_.front().in; }
  std::size_t output_size() const { return layers_.empty() ? 0 : layers_.back().out; }
  std::size_t param_count() const { return params_.size(); }
  const std::vector<LayerShape>& layers() const { return layers_; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::span<double> weights(std::size_t layer);
  std::span<double> bias(std::size_t layer);

  std::vector<double> forward(std::span<const double> input) const;
  void forward(std::span<const double> input, Tape& tape) const;

  // Reverse pass for <upstream, output>. Parameter gradients are ADDED into
  // param_grad (size param_count()); input_grad (size input_size()) is
  // overwritten. Either span may be empty to skip it.
  void backward(const Tape& tape, std::span<const double> upstream,
                std::span<double> param_grad, std::span<double> input_grad) const;

  bool operator==(const Mlp&) const = default;

 private:
  std::vector<LayerShape> layers_;
  std::vector<double> params_;
};

// p <- p - lr * g. Throws on non-finite gradients.
void sgd_step(std::span<double> params, std::span<const double> grads, double lr);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t steps = 0;
  std::vector<double> m;
  std::vector<double> v;
};

// Bias-corrected Adam descent step.
void adam_step(std::span<double> params, std::span<const double> grads, double lr,
               AdamState& state);

// target <- tau * online + (1 - tau) * target.
void soft_update(std::span<const double> online, std::span<double> target, double tau);
void soft_update(const Mlp& online, Mlp& target, double tau);

struct TargetPair {
  Mlp online;
  Mlp target;
};
void soft_update(TargetPair& pair, double tau);

// Binary layout: "LTOSMLP1", u32 layer count, per layer u32 (in, out, act),
// then every parameter as a little-endian float64 in flat order.
void write_mlp(std::ostream& out, const Mlp& mlp);
Mlp read_mlp(std::istream& in);

}  // namespace ltos

#endif  // LTOS_MLP_HPP
