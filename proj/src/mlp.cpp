#include "ltos/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace ltos {
namespace {

constexpr char kMagic[8] = {'L', 'T', 'O', 'S', 'M', 'L', 'P', '1'};

void apply_activation(Activation act, std::span<double> z) {
  switch (act) {
    case Activation::kIdentity:
      return;
    case Activation::kRelu:
      for (double& v : z) v = v > 0.0 ? v : 0.0;
      return;
    case Activation::kSoftmax: {
      const double peak = *std::max_element(z.begin(), z.end());
      double total = 0.0;
      for (double& v : z) total += (v = std::exp(v - peak));
      for (double& v : z) v /= total;
      return;
    }
  }
}

void check_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw std::domain_error(std::string(what) + ": non-finite value");
  }
}

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw std::runtime_error("read_mlp: truncated checkpoint");
  }
  return value;
}

}  // namespace

Mlp::Mlp(std::span<const std::size_t> sizes, Activation hidden, Activation output) {
  if (sizes.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    if (sizes[l] == 0 || sizes[l + 1] == 0) throw std::invalid_argument("Mlp: zero-width layer");
    LayerShape shape;
    shape.in = sizes[l];
    shape.out = sizes[l + 1];
    shape.act = (l + 2 == sizes.size()) ? output : hidden;
    shape.weight_offset = offset;
    offset += shape.in * shape.out;
    shape.bias_offset = offset;
    offset += shape.out;
    layers_.push_back(shape);
  }
  params_.assign(offset, 0.0);
}

Mlp::Mlp(std::initializer_list<std::size_t> sizes, Activation hidden, Activation output)
    : Mlp(std::span<const std::size_t>(sizes.begin(), sizes.size()), hidden, output) {}

void Mlp::initialize(Rng& rng, Init init, double stddev) {
  for (const auto& layer : layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    for (std::size_t k = 0; k < layer.in * layer.out; ++k) {
      params_[layer.weight_offset + k] =
          init == Init::kUniform ? rng.uniform(-bound, bound) : rng.normal(0.0, stddev);
    }
    std::fill_n(params_.begin() + static_cast<std::ptrdiff_t>(layer.bias_offset), layer.out, 0.0);
  }
}

std::span<double> Mlp::weights(std::size_t layer) {
  const auto& s = layers_.at(layer);
  return std::span<double>(params_).subspan(s.weight_offset, s.in * s.out);
}

std::span<double> Mlp::bias(std::size_t layer) {
  const auto& s = layers_.at(layer);
  return std::span<double>(params_).subspan(s.bias_offset, s.out);
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
  Tape tape;
  forward(input, tape);
  return std::move(tape.values.back());
}

void Mlp::forward(std::span<const double> input, Tape& tape) const {
  if (input.size() != input_size()) {
    throw std::invalid_argument("Mlp::forward: input has " + std::to_string(input.size()) +
                                " entries, expected " + std::to_string(input_size()));
  }
  tape.values.resize(layers_.size() + 1);
  tape.values[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LayerShape& s = layers_[l];
    const double* w = params_.data() + s.weight_offset;
    const double* b = params_.data() + s.bias_offset;
    const std::vector<double>& x = tape.values[l];
    std::vector<double>& z = tape.values[l + 1];
    z.resize(s.out);
    for (std::size_t o = 0; o < s.out; ++o) {
      double acc = b[o];
      const double* row = w + o * s.in;
      for (std::size_t i = 0; i < s.in; ++i) acc += row[i] * x[i];
      z[o] = acc;
    }
    apply_activation(s.act, z);
  }
}

void Mlp::backward(const Tape& tape, std::span<const double> upstream,
                   std::span<double> param_grad, std::span<double> input_grad) const {
  if (tape.values.size() != layers_.size() + 1 || upstream.size() != output_size()) {
    throw std::invalid_argument("Mlp::backward: tape or upstream does not match the network");
  }
  if (!param_grad.empty() && param_grad.size() != params_.size()) {
    throw std::invalid_argument("Mlp::backward: parameter gradient size mismatch");
  }
  if (!input_grad.empty() && input_grad.size() != input_size()) {
    throw std::invalid_argument("Mlp::backward: input gradient size mismatch");
  }
  std::vector<double> delta(upstream.begin(), upstream.end());
  std::vector<double> next;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const LayerShape& s = layers_[l];
    const std::vector<double>& y = tape.values[l + 1];
    const std::vector<double>& x = tape.values[l];
    // delta: d/d(post-activation) -> d/d(pre-activation)
    switch (s.act) {
      case Activation::kIdentity:
        break;
      case Activation::kRelu:
        for (std::size_t o = 0; o < s.out; ++o) {
          if (y[o] <= 0.0) delta[o] = 0.0;
        }
        break;
      case Activation::kSoftmax: {
        double dot = 0.0;
        for (std::size_t o = 0; o < s.out; ++o) dot += delta[o] * y[o];
        for (std::size_t o = 0; o < s.out; ++o) delta[o] = y[o] * (delta[o] - dot);
        break;
      }
    }
    const double* w = params_.data() + s.weight_offset;
    if (!param_grad.empty()) {
      double* gw = param_grad.data() + s.weight_offset;
      double* gb = param_grad.data() + s.bias_offset;
      for (std::size_t o = 0; o < s.out; ++o) {
        if (delta[o] == 0.0) continue;
        gb[o] += delta[o];
        double* row = gw + o * s.in;
        for (std::size_t i = 0; i < s.in; ++i) row[i] += delta[o] * x[i];
      }
    }
    if (l == 0 && input_grad.empty()) break;
    next.assign(s.in, 0.0);
    for (std::size_t o = 0; o < s.out; ++o) {
      if (delta[o] == 0.0) continue;
      const double* row = w + o * s.in;
      for (std::size_t i = 0; i < s.in; ++i) next[i] += delta[o] * row[i];
    }
    delta.swap(next);
  }
  if (!input_grad.empty()) std::copy(delta.begin(), delta.end(), input_grad.begin());
}

void sgd_step(std::span<double> params, std::span<const double> grads, double lr) {
  if (params.size() != grads.size()) throw std::invalid_argument("sgd_step: size mismatch");
  check_finite(grads, "sgd_step");
  for (std::size_t k = 0; k < params.size(); ++k) params[k] -= lr * grads[k];
}

void adam_step(std::span<double> params, std::span<const double> grads, double lr,
               AdamState& state) {
  if (params.size() != grads.size()) throw std::invalid_argument("adam_step: size mismatch");
  check_finite(grads, "adam_step");
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
    state.steps = 0;
  }
  ++state.steps;
  const double t = static_cast<double>(state.steps);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double g = grads[k];
    state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * g;
    state.v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m[k] / c1;
    const double v_hat = state.v[k] / c2;
    params[k] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

void soft_update(std::span<const double> online, std::span<double> target, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("soft_update: tau=" + std::to_string(tau) + " outside [0,1]");
  }
  if (online.size() != target.size()) throw std::invalid_argument("soft_update: shape mismatch");
  for (std::size_t k = 0; k < target.size(); ++k) {
    target[k] = tau * online[k] + (1.0 - tau) * target[k];
  }
}

void soft_update(const Mlp& online, Mlp& target, double tau) {
  if (online.layers().size() != target.layers().size()) {
    throw std::invalid_argument("soft_update: layer mismatch");
  }
  for (std::size_t l = 0; l < online.layers().size(); ++l) {
    if (online.layers()[l].in != target.layers()[l].in ||
        online.layers()[l].out != target.layers()[l].out) {
      throw std::invalid_argument("soft_update: layer shape mismatch");
    }
  }
  soft_update(online.params(), target.params(), tau);
}

void soft_update(TargetPair& pair, double tau) { soft_update(pair.online, pair.target, tau); }

void write_mlp(std::ostream& out, const Mlp& mlp) {
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(mlp.layers().size()));
  for (const auto& s : mlp.layers()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.in));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.out));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.act));
  }
  for (double p : mlp.params()) put<double>(out, p);
}

Mlp read_mlp(std::istream& in) {
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("read_mlp: bad magic");
  }
  const auto n_layers = get<std::uint32_t>(in);
  if (n_layers == 0) throw std::runtime_error("read_mlp: no layers");
  std::vector<std::size_t> sizes;
  std::vector<Activation> acts;
  for (std::uint32_t l = 0; l < n_layers; ++l) {
    const auto in_size = get<std::uint32_t>(in);
    const auto out_size = get<std::uint32_t>(in);
    const auto act = get<std::uint32_t>(in);
    if (act > 2) throw std::runtime_error("read_mlp: unknown activation tag");
    if (l == 0) sizes.push_back(in_size);
    if (sizes.back() != in_size) throw std::runtime_error("read_mlp: layers do not chain");
    sizes.push_back(out_size);
    acts.push_back(static_cast<Activation>(act));
  }
  Mlp mlp(sizes, acts.front(), acts.back());
  for (std::size_t l = 0; l + 1 < acts.size(); ++l) {
    if (acts[l] != acts.front()) throw std::runtime_error("read_mlp: mixed hidden activations");
  }
  for (double& p : mlp.params()) p = get<double>(in);
  check_finite(mlp.params(), "read_mlp");
  return mlp;
}

}  // namespace ltos
