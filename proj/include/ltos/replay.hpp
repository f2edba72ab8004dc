#ifndef LTOS_REPLAY_HPP
#define LTOS_REPLAY_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ltos/keyed.hpp"
#include "ltos/observation.hpp"
#include "ltos/rng.hpp"
#include "ltos/topology.hpp"

namespace ltos {

// Everything all agents stored at one timestep.
struct JointRecord {
  std::uint64_t timestamp = 0;
  ObservationTable obs;
  ObservationTable next_obs;
  std::vector<Keyed> w_in;  // behavior incoming weights, keyed by graph
  std::vector<int> actions;
  std::vector<double> shaped_rewards;
  std::shared_ptr<const SharingGraph> graph;       // N_i at t
  std::shared_ptr<const SharingGraph> next_graph;  // N_i at t+1
  bool done = false;
};

// Agent i's view of one stored record: (o, w_in, a, r_w, o', N_i, N_i') plus
// the exchanged observations of the joint record for neighbor slots.
struct Transition {
  AgentId agent = 0;
  std::uint64_t timestamp = 0;
  std::span<const double> o;
  const Keyed* w_in = nullptr;
  int a = 0;
  double r_w = 0.0;
  std::span<const double> o_next;
  std::span<const AgentId> neighbors;
  std::span<const AgentId> neighbors_next;
  bool done = false;
  const ObservationTable* joint_obs = nullptr;
  const ObservationTable* joint_obs_next = nullptr;
};

// One logical ring buffer shared by all agents. Per-agent buffers are views
// into it, so their lengths and insertion timestamps always agree and a
// single index draw addresses the same timestep for every agent.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int n_agents);

  void push(JointRecord record);  // evicts the oldest record when full

  std::size_t size() const { return records_.size(); }
  std::size_t capacity() const { return capacity_; }
  int n_agents() const { return n_agents_; }

  // index 0 is the oldest stored record
  const JointRecord& record(std::size_t index) const;
  Transition view(AgentId agent, std::size_t index) const;

  // Uniform with replacement; one draw serves every agent.
  std::vector<std::size_t> sample(Rng& rng, std::size_t count) const;

 private:
  std::size_t capacity_;
  int n_agents_;
  std::size_t head_ = 0;  // position of the oldest record once full
  std::vector<JointRecord> records_;
};

}  // namespace ltos

#endif  // LTOS_REPLAY_HPP
