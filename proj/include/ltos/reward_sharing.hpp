#ifndef LTOS_REWARD_SHARING_HPP
#define LTOS_REWARD_SHARING_HPP

#include <span>
#include <vector>

#include "ltos/execution.hpp"
#include "ltos/keyed.hpp"
#include "ltos/topology.hpp"

namespace ltos {

inline constexpr double kSimplexTolerance = 1e-6;

// Outgoing sharing weights w_i^out for every agent, keyed by its neighborhood.
struct WeightAssignment {
  std::vector<Keyed> out;

  double weight(AgentId from, AgentId to) const {
    return out.at(static_cast<std::size_t>(from)).at(to);
  }
};

// Self-loop weight 1 for every agent.
WeightAssignment identity_weights(const SharingGraph& graph);
WeightAssignment uniform_weights(const SharingGraph& graph);
// w_ii = s0 and (1 - s0) / |N_i \ {i}| to each neighbor; an isolated agent
// keeps everything. Throws unless s0 in (0,1].
WeightAssignment selfish_weights(const SharingGraph& graph, double s0);

// Throws std::invalid_argument when keys differ from the graph neighborhoods,
// an entry leaves [0,1], or a row misses the simplex by more than 1e-6.
void validate_weights(const SharingGraph& graph, const WeightAssignment& w);

// w_i^in[j] = w_ji for j in N_i.
std::vector<Keyed> incoming_weights(const SharingGraph& graph, const WeightAssignment& w);

// Shaped rewards r_i^w = sum_{j in N_i} w_ji r_j. The serial path scatters
// each agent's reward along its outgoing edges; the parallel path gathers
// per receiving agent.
std::vector<double> share_rewards(const SharingGraph& graph, const WeightAssignment& w,
                                  std::span<const double> raw,
                                  Execution exec = Execution::kSerial);

std::vector<double> selfishness(const WeightAssignment& w);

}  // namespace ltos

#endif  // LTOS_REWARD_SHARING_HPP
