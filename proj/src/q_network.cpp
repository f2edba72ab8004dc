#include "ltos/q_network.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace ltos {
namespace {

std::vector<double> with_weight(std::span<const double> features, double weight) {
  std::vector<double> v;
  v.reserve(features.size() + 1);
  v.assign(features.begin(), features.end());
  v.push_back(weight);
  return v;
}

template <typename Lookup>
QInput build_q_input(AgentId self, std::span<const AgentId> neighborhood, const Keyed& w_in,
                     Lookup&& obs_of) {
  if (!w_in.has_keys(neighborhood) || w_in.values.size() != w_in.keys.size()) {
    throw std::invalid_argument("q input: incoming weights of agent " + std::to_string(self) +
                                " are not keyed by its neighborhood");
  }
  QInput in;
  in.self = self;
  in.obs = obs_of(self);
  bool has_self = false;
  for (std::size_t s = 0; s < neighborhood.size(); ++s) {
    const AgentId j = neighborhood[s];
    if (j == self) {
      in.self_weight = w_in.values[s];
      has_self = true;
    } else {
      in.neighbors.push_back({j, w_in.values[s], obs_of(j)});
    }
  }
  if (!has_self) {
    throw std::invalid_argument("q input: neighborhood of agent " + std::to_string(self) +
                                " lacks the self-loop");
  }
  return in;
}

}  // namespace

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::kSgd ? "sgd" : "adam"; }

OptimizerKind optimizer_from_string(const std::string& name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw std::invalid_argument("unknown optimizer '" + name + "'");
}

QInput make_q_input(AgentId self, std::span<const AgentId> neighborhood, const Keyed& w_in,
                    const std::vector<std::vector<double>>& observations) {
  return build_q_input(self, neighborhood, w_in, [&](AgentId j) {
    return std::span<const double>(observations.at(static_cast<std::size_t>(j)));
  });
}

QInput make_q_input(AgentId self, std::span<const AgentId> neighborhood, const Keyed& w_in,
                    const ObservationTable& observations) {
  return build_q_input(self, neighborhood, w_in, [&](AgentId j) { return observations.of(j); });
}

QNetwork::QNetwork(std::size_t obs_size, std::size_t hidden, int n_actions)
    : self_({obs_size + 1, hidden}, Activation::kRelu, Activation::kRelu),
      neighbor_({obs_size + 1, hidden}, Activation::kRelu, Activation::kRelu),
      head_({2 * hidden, hidden, static_cast<std::size_t>(n_actions)}, Activation::kRelu,
            Activation::kIdentity) {}

void QNetwork::initialize(Rng& rng, Init init, double stddev) {
  self_.initialize(rng, init, stddev);
  neighbor_.initialize(rng, init, stddev);
  head_.initialize(rng, init, stddev);
}

void QNetwork::forward(const QInput& input, Tape& tape) const {
  if (input.obs.size() != obs_size()) {
    throw std::invalid_argument("QNetwork: observation has " + std::to_string(input.obs.size()) +
                                " entries, expected " + std::to_string(obs_size()));
  }
  self_.forward(with_weight(input.obs, input.self_weight), tape.self);

  std::vector<std::size_t> idx(input.neighbors.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return input.neighbors[a].id < input.neighbors[b].id;
  });
  tape.neighbors.resize(idx.size());
  tape.order.resize(idx.size());
  const std::size_t hidden = self_.output_size();
  std::vector<double> head_in(2 * hidden, 0.0);
  std::copy(tape.self.output().begin(), tape.self.output().end(), head_in.begin());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const NeighborSlot& slot = input.neighbors[idx[r]];
    if (slot.id == input.self) throw std::invalid_argument("QNetwork: self listed as neighbor");
    if (r > 0 && slot.id == tape.order[r - 1]) {
      throw std::invalid_argument("QNetwork: duplicate neighbor " + std::to_string(slot.id));
    }
    if (slot.features.size() != obs_size()) {
      throw std::invalid_argument("QNetwork: neighbor features have the wrong size");
    }
    tape.order[r] = slot.id;
    neighbor_.forward(with_weight(slot.features, slot.weight), tape.neighbors[r]);
    const auto h = tape.neighbors[r].output();
    for (std::size_t k = 0; k < hidden; ++k) head_in[hidden + k] += h[k];
  }
  if (!idx.empty()) {
    const double inv = 1.0 / static_cast<double>(idx.size());
    for (std::size_t k = 0; k < hidden; ++k) head_in[hidden + k] *= inv;
  }
  head_.forward(head_in, tape.head);
}

std::vector<double> QNetwork::q_values(const QInput& input) const {
  Tape tape;
  forward(input, tape);
  auto out = tape.head.output();
  return {out.begin(), out.end()};
}

QGradients QNetwork::zero_gradients() const {
  return {std::vector<double>(self_.param_count(), 0.0),
          std::vector<double>(neighbor_.param_count(), 0.0),
          std::vector<double>(head_.param_count(), 0.0)};
}

void QNetwork::backward(const Tape& tape, AgentId self, std::span<const double> upstream,
                        QGradients* grads, Keyed* weight_grads) const {
  const std::size_t hidden = self_.output_size();
  const bool want_inputs = weight_grads != nullptr;
  std::vector<double> head_in_grad(2 * hidden);
  head_.backward(tape.head, upstream, grads ? std::span<double>(grads->head) : std::span<double>{},
                 head_in_grad);

  std::vector<double> in_grad(self_.input_size());
  std::span<double> in_span = want_inputs ? std::span<double>(in_grad) : std::span<double>{};
  self_.backward(tape.self, std::span<const double>(head_in_grad).first(hidden),
                 grads ? std::span<double>(grads->self) : std::span<double>{}, in_span);
  const double self_weight_grad = want_inputs ? in_grad.back() : 0.0;

  std::vector<double> neighbor_grads(tape.neighbors.size(), 0.0);
  if (!tape.neighbors.empty()) {
    std::vector<double> pooled(head_in_grad.begin() + static_cast<std::ptrdiff_t>(hidden),
                               head_in_grad.end());
    const double inv = 1.0 / static_cast<double>(tape.neighbors.size());
    for (double& g : pooled) g *= inv;
    for (std::size_t r = 0; r < tape.neighbors.size(); ++r) {
      neighbor_.backward(tape.neighbors[r], pooled,
                         grads ? std::span<double>(grads->neighbor) : std::span<double>{},
                         in_span);
      if (want_inputs) neighbor_grads[r] = in_grad.back();
    }
  }

  if (want_inputs) {
    weight_grads->keys.clear();
    weight_grads->values.clear();
    bool placed = false;
    for (std::size_t r = 0; r <= tape.order.size(); ++r) {
      if (!placed && (r == tape.order.size() || tape.order[r] > self)) {
        weight_grads->keys.push_back(self);
        weight_grads->values.push_back(self_weight_grad);
        placed = true;
      }
      if (r < tape.order.size()) {
        weight_grads->keys.push_back(tape.order[r]);
        weight_grads->values.push_back(neighbor_grads[r]);
      }
    }
  }
}

int argmax(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax: empty");
  int best = 0;
  for (int a = 1; a < static_cast<int>(values.size()); ++a) {
    if (values[a] > values[best]) best = a;
  }
  return best;
}

double EpsilonSchedule::value(std::uint64_t n) const {
  const double raw = start * std::pow(decay, static_cast<double>(n));
  return start >= end ? std::max(end, raw) : std::min(end, raw);
}

int select_action(const QNetwork& net, const QInput& input, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("select_action: epsilon outside [0,1]");
  }
  if (rng.uniform() < epsilon) return static_cast<int>(rng.index(net.n_actions()));
  return argmax(net.q_values(input));
}

double td_target(const QNetwork& target, double shaped_reward, bool done, double gamma,
                 const QInput& next_input) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("td_target: gamma=" + std::to_string(gamma) + " outside [0,1]");
  }
  if (done || gamma == 0.0) return shaped_reward;
  const auto q = target.q_values(next_input);
  return shaped_reward + gamma * *std::max_element(q.begin(), q.end());
}

QOptimizer QOptimizer::make(OptimizerKind kind, double lr) {
  QOptimizer opt;
  for (auto& block : opt.blocks) {
    block.kind = kind;
    block.lr = lr;
  }
  return opt;
}

double q_update(QNetwork& net, QOptimizer& opt, std::span<const QSample> batch) {
  if (batch.empty()) throw std::invalid_argument("q_update: empty minibatch");
  QGradients grads = net.zero_gradients();
  QNetwork::Tape tape;
  std::vector<double> upstream(static_cast<std::size_t>(net.n_actions()));
  const double inv = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (const QSample& sample : batch) {
    if (sample.action < 0 || sample.action >= net.n_actions()) {
      throw std::invalid_argument("q_update: action out of range");
    }
    net.forward(sample.input, tape);
    const double err = sample.target - tape.head.output()[sample.action];
    loss += err * err * inv;
    std::fill(upstream.begin(), upstream.end(), 0.0);
    upstream[sample.action] = -2.0 * err * inv;
    net.backward(tape, sample.input.self, upstream, &grads, nullptr);
  }
  if (!std::isfinite(loss)) throw std::domain_error("q_update: non-finite loss");
  opt.blocks[0].descend(net.self_encoder().params(), grads.self);
  opt.blocks[1].descend(net.neighbor_encoder().params(), grads.neighbor);
  opt.blocks[2].descend(net.head().params(), grads.head);
  return loss;
}

Keyed q_input_gradient(const QNetwork& net, const QInput& input) {
  QNetwork::Tape tape;
  net.forward(input, tape);
  std::vector<double> upstream(static_cast<std::size_t>(net.n_actions()), 0.0);
  upstream[argmax(tape.head.output())] = 1.0;
  Keyed out;
  net.backward(tape, input.self, upstream, nullptr, &out);
  return out;
}

void write_q_network(std::ostream& out, const QNetwork& net) {
  write_mlp(out, net.self_encoder());
  write_mlp(out, net.neighbor_encoder());
  write_mlp(out, net.head());
}

QNetwork read_q_network(std::istream& in) {
  QNetwork net;
  net.self_encoder() = read_mlp(in);
  net.neighbor_encoder() = read_mlp(in);
  net.head() = read_mlp(in);
  return net;
}

}  // namespace ltos
