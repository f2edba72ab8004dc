#include "ltos/reward_sharing.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ltos {

WeightAssignment identity_weights(const SharingGraph& graph) {
  WeightAssignment w;
  w.out.resize(static_cast<std::size_t>(graph.n_agents()));
  for (AgentId i = 0; i < graph.n_agents(); ++i) {
    auto hood = graph.neighborhood(i);
    w.out[i].keys.assign(hood.begin(), hood.end());
    w.out[i].values.assign(hood.size(), 0.0);
    w.out[i].values[static_cast<std::size_t>(graph.slot_of(i, i))] = 1.0;
  }
  return w;
}

WeightAssignment uniform_weights(const SharingGraph& graph) {
  WeightAssignment w;
  w.out.resize(static_cast<std::size_t>(graph.n_agents()));
  for (AgentId i = 0; i < graph.n_agents(); ++i) {
    auto hood = graph.neighborhood(i);
    w.out[i].keys.assign(hood.begin(), hood.end());
    w.out[i].values.assign(hood.size(), 1.0 / static_cast<double>(hood.size()));
  }
  return w;
}

WeightAssignment selfish_weights(const SharingGraph& graph, double s0) {
  if (!(s0 > 0.0 && s0 <= 1.0)) {
    throw std::invalid_argument("selfish_weights: s0 must be in (0,1]");
  }
  WeightAssignment w;
  w.out.resize(static_cast<std::size_t>(graph.n_agents()));
  for (AgentId i = 0; i < graph.n_agents(); ++i) {
    auto hood = graph.neighborhood(i);
    const std::size_t others = hood.size() - 1;
    w.out[i].keys.assign(hood.begin(), hood.end());
    w.out[i].values.assign(hood.size(), others == 0 ? 0.0 : (1.0 - s0) / static_cast<double>(others));
    w.out[i].values[static_cast<std::size_t>(graph.slot_of(i, i))] = others == 0 ? 1.0 : s0;
  }
  return w;
}

void validate_weights(const SharingGraph& graph, const WeightAssignment& w) {
  if (static_cast<int>(w.out.size()) != graph.n_agents()) {
    throw std::invalid_argument("weights: expected " + std::to_string(graph.n_agents()) +
                                " rows, got " + std::to_string(w.out.size()));
  }
  for (AgentId i = 0; i < graph.n_agents(); ++i) {
    const Keyed& row = w.out[i];
    if (row.values.size() != row.keys.size() || !row.has_keys(graph.neighborhood(i))) {
      throw std::invalid_argument("weights: agent " + std::to_string(i) +
                                  " is not keyed by its neighborhood");
    }
    double sum = 0.0;
    for (double v : row.values) {
      if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream msg;
        msg << "weights: agent " << i << " has entry " << v << " outside [0,1]";
        throw std::invalid_argument(msg.str());
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSimplexTolerance) {
      std::ostringstream msg;
      msg << "weights: agent " << i << " sums to " << sum;
      throw std::invalid_argument(msg.str());
    }
  }
}

std::vector<Keyed> incoming_weights(const SharingGraph& graph, const WeightAssignment& w) {
  std::vector<Keyed> in(static_cast<std::size_t>(graph.n_agents()));
  for (AgentId i = 0; i < graph.n_agents(); ++i) {
    auto hood = graph.neighborhood(i);
    in[i].keys.assign(hood.begin(), hood.end());
    in[i].values.resize(hood.size());
    for (std::size_t s = 0; s < hood.size(); ++s) in[i].values[s] = w.weight(hood[s], i);
  }
  return in;
}

std::vector<double> share_rewards(const SharingGraph& graph, const WeightAssignment& w,
                                  std::span<const double> raw, Execution exec) {
  validate_weights(graph, w);
  const int n = graph.n_agents();
  if (static_cast<int>(raw.size()) != n) {
    throw std::invalid_argument("share_rewards: " + std::to_string(raw.size()) +
                                " rewards for " + std::to_string(n) + " agents");
  }
  std::vector<double> shaped(static_cast<std::size_t>(n), 0.0);
  if (exec == Execution::kSerial) {
    for (AgentId j = 0; j < n; ++j) {
      const Keyed& row = w.out[j];
      for (std::size_t s = 0; s < row.size(); ++s) shaped[row.keys[s]] += row.values[s] * raw[j];
    }
    return shaped;
  }
#pragma omp parallel for schedule(static)
  for (AgentId i = 0; i < n; ++i) {
    double acc = 0.0;
    for (AgentId j : graph.neighborhood(i)) acc += w.weight(j, i) * raw[j];
    shaped[i] = acc;
  }
  return shaped;
}

std::vector<double> selfishness(const WeightAssignment& w) {
  std::vector<double> out(w.out.size());
  for (std::size_t i = 0; i < w.out.size(); ++i) out[i] = w.out[i].at(static_cast<AgentId>(i));
  return out;
}

}  // namespace ltos
