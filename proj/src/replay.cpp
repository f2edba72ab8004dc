#include "ltos/replay.hpp"

#include <cmath>
#include <stdexcept>

namespace ltos {

ReplayBuffer::ReplayBuffer(std::size_t capacity, int n_agents)
    : capacity_(capacity), n_agents_(n_agents) {
  if (capacity == 0) throw std::invalid_argument("replay: capacity must be positive");
  if (n_agents <= 0) throw std::invalid_argument("replay: need at least one agent");
}

void ReplayBuffer::push(JointRecord record) {
  if (record.obs.n_agents() != n_agents_ || record.next_obs.n_agents() != n_agents_ ||
      static_cast<int>(record.w_in.size()) != n_agents_ ||
      static_cast<int>(record.actions.size()) != n_agents_ ||
      static_cast<int>(record.shaped_rewards.size()) != n_agents_ || !record.graph ||
      !record.next_graph) {
    throw std::invalid_argument("replay: record does not cover every agent");
  }
  for (double r : record.shaped_rewards) {
    if (!std::isfinite(r)) throw std::domain_error("replay: non-finite shaped reward");
  }
  if (records_.size() < capacity_) {
    records_.push_back(std::move(record));
    return;
  }
  records_[head_] = std::move(record);
  head_ = (head_ + 1) % capacity_;
}

const JointRecord& ReplayBuffer::record(std::size_t index) const {
  if (index >= records_.size()) throw std::out_of_range("replay: index out of range");
  return records_[(head_ + index) % records_.size()];
}

Transition ReplayBuffer::view(AgentId agent, std::size_t index) const {
  if (agent < 0 || agent >= n_agents_) throw std::out_of_range("replay: unknown agent");
  const JointRecord& r = record(index);
  Transition t;
  t.agent = agent;
  t.timestamp = r.timestamp;
  t.o = r.obs.of(agent);
  t.w_in = &r.w_in[agent];
  t.a = r.actions[agent];
  t.r_w = r.shaped_rewards[agent];
  t.o_next = r.next_obs.of(agent);
  t.neighbors = r.graph->neighborhood(agent);
  t.neighbors_next = r.next_graph->neighborhood(agent);
  t.done = r.done;
  t.joint_obs = &r.obs;
  t.joint_obs_next = &r.next_obs;
  return t;
}

std::vector<std::size_t> ReplayBuffer::sample(Rng& rng, std::size_t count) const {
  if (records_.empty()) throw std::logic_error("replay: sampling from an empty buffer");
  std::vector<std::size_t> idx(count);
  for (auto& i : idx) i = rng.index(records_.size());
  return idx;
}

}  // namespace ltos
