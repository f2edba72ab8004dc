#include "ltos/foraging.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace ltos {
namespace {

constexpr int kDx[4] = {0, 0, -1, 1};
constexpr int kDy[4] = {1, -1, 0, 0};

bool inside(const ForagingConfig& c, Cell p) {
  return p.x >= 0 && p.y >= 0 && p.x < c.grid && p.y < c.grid;
}

double dist2(Cell a, Cell b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Indices of `cells` ordered by distance to `from`, ties by index, skipping `skip`.
std::vector<int> nearest(Cell from, const std::vector<Cell>& cells, int skip) {
  std::vector<int> order;
  for (int j = 0; j < static_cast<int>(cells.size()); ++j) {
    if (j != skip) order.push_back(j);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return dist2(from, cells[a]) < dist2(from, cells[b]);
  });
  return order;
}

std::vector<Vec2> to_points(const std::vector<Cell>& cells) {
  std::vector<Vec2> out;
  out.reserve(cells.size());
  for (Cell c : cells) out.push_back({static_cast<double>(c.x), static_cast<double>(c.y)});
  return out;
}

}  // namespace

void validate(const ForagingConfig& c) {
  if (c.grid < 1) throw std::invalid_argument("foraging: grid must be positive");
  if (c.n_agents < 1) throw std::invalid_argument("foraging: need at least one agent");
  if (c.n_foods < 0) throw std::invalid_argument("foraging: negative food count");
  if (c.n_agents + c.n_foods > c.grid * c.grid) {
    throw std::invalid_argument("foraging: " + std::to_string(c.n_agents) + " agents + " +
                                std::to_string(c.n_foods) + " foods exceed " +
                                std::to_string(c.grid * c.grid) + " cells");
  }
  if (c.k_neighbors < 0) throw std::invalid_argument("foraging: negative k_neighbors");
  if (c.food_slots < 0) throw std::invalid_argument("foraging: negative food_slots");
  if (c.horizon < 0) throw std::invalid_argument("foraging: negative horizon");
}

std::vector<std::vector<double>> foraging_observations(const ForagingConfig& c,
                                                       const ForagingState& s) {
  const double scale = static_cast<double>(c.grid);
  const int n = static_cast<int>(s.agents.size());
  const std::size_t width = 2 + 2 * static_cast<std::size_t>(c.food_slots + c.k_neighbors);
  std::vector<std::vector<double>> obs(static_cast<std::size_t>(n),
                                       std::vector<double>(width, 0.0));
  for (int i = 0; i < n; ++i) {
    const Cell me = s.agents[i];
    auto& o = obs[i];
    o[0] = me.x / scale;
    o[1] = me.y / scale;
    std::size_t at = 2;
    auto foods = nearest(me, s.foods, -1);
    for (int slot = 0; slot < c.food_slots; ++slot, at += 2) {
      if (slot >= static_cast<int>(foods.size())) continue;
      const Cell f = s.foods[foods[slot]];
      o[at] = (f.x - me.x) / scale;
      o[at + 1] = (f.y - me.y) / scale;
    }
    auto others = nearest(me, s.agents, i);
    for (int slot = 0; slot < c.k_neighbors; ++slot, at += 2) {
      if (slot >= static_cast<int>(others.size())) continue;
      const Cell a = s.agents[others[slot]];
      o[at] = (a.x - me.x) / scale;
      o[at + 1] = (a.y - me.y) / scale;
    }
  }
  return obs;
}

double foraging_upper_bound(const ForagingConfig& c, const ForagingState& s) {
  if (s.agents.empty() || s.foods.empty() || c.horizon == 0) return 0.0;
  double total = 0.0;
  for (Cell a : s.agents) {
    int best = 2 * c.grid;
    for (Cell f : s.foods) best = std::min(best, std::abs(a.x - f.x) + std::abs(a.y - f.y));
    const int eating_steps = std::max(0, c.horizon - (best - 1));
    total += static_cast<double>(eating_steps) / c.horizon;
  }
  return total / static_cast<double>(s.agents.size());
}

std::vector<double> foraging_transition(const ForagingConfig& c, ForagingState& s,
                                        std::span<const int> actions) {
  if (s.done) throw std::logic_error("foraging: step after episode end");
  const int n = static_cast<int>(s.agents.size());
  if (static_cast<int>(actions.size()) != n) {
    throw std::invalid_argument("foraging: expected " + std::to_string(n) + " actions");
  }
  for (int a : actions) {
    if (a < 0 || a >= kForagingActionCount) {
      throw std::invalid_argument("foraging: action " + std::to_string(a) + " out of range");
    }
  }
  auto agent_at = [&](Cell p) {
    for (int j = 0; j < n; ++j) {
      if (s.agents[j] == p) return j;
    }
    return -1;
  };
  auto food_at = [&](Cell p) {
    for (int f = 0; f < static_cast<int>(s.foods.size()); ++f) {
      if (s.foods[f] == p) return f;
    }
    return -1;
  };

  // Attacks read positions from the start of the tick.
  std::vector<double> rewards(static_cast<std::size_t>(n), 0.0);
  std::vector<bool> eaten(s.foods.size(), false);
  for (int i = 0; i < n; ++i) {
    if (actions[i] < kAttackUp) continue;
    const int dir = actions[i] - kAttackUp;
    const Cell target{s.agents[i].x + kDx[dir], s.agents[i].y + kDy[dir]};
    if (const int f = inside(c, target) ? food_at(target) : -1; f >= 0) {
      rewards[i] += kFoodReward;
      eaten[f] = true;
    } else if (const int v = inside(c, target) ? agent_at(target) : -1; v >= 0) {
      rewards[i] += kAttackerReward;
      rewards[v] += kVictimReward;
    } else {
      rewards[i] += kBlankAttackReward;
    }
  }

  // Moves fail into walls, foods, occupied cells, or cells a lower id claims.
  std::vector<Cell> wanted(s.agents);
  std::vector<bool> valid(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    if (actions[i] >= kAttackUp) continue;
    const Cell target{s.agents[i].x + kDx[actions[i]], s.agents[i].y + kDy[actions[i]]};
    if (!inside(c, target) || food_at(target) >= 0 || agent_at(target) >= 0) continue;
    wanted[i] = target;
    valid[i] = true;
  }
  for (int i = 0; i < n; ++i) {
    if (!valid[i]) continue;
    bool claimed = false;
    for (int j = 0; j < i && !claimed; ++j) claimed = valid[j] && wanted[j] == wanted[i];
    if (!claimed) s.agents[i] = wanted[i];
  }

  if (c.food_consumed) {
    std::vector<Cell> kept;
    for (std::size_t f = 0; f < s.foods.size(); ++f) {
      if (!eaten[f]) kept.push_back(s.foods[f]);
    }
    s.foods = std::move(kept);
  }
  s.t += 1;
  s.done = s.t >= c.horizon;
  return rewards;
}

ForagingEnv::ForagingEnv(ForagingConfig config, std::uint64_t seed)
    : config_(config), rng_(seed, 0xf00d) {
  validate(config_);
}

std::size_t ForagingEnv::observation_size() const {
  return 2 + 2 * static_cast<std::size_t>(config_.food_slots + config_.k_neighbors);
}

EnvStep ForagingEnv::make_step(std::vector<double> rewards) const {
  EnvStep out;
  out.observations = foraging_observations(config_, state_);
  out.rewards = std::move(rewards);
  out.done = state_.done;
  const auto points = to_points(state_.agents);
  out.graph = std::make_shared<SharingGraph>(
      knn_neighborhoods(points, std::min(config_.k_neighbors, config_.n_agents - 1), k_max()));
  return out;
}

EnvStep ForagingEnv::reset() {
  const int cells = config_.grid * config_.grid;
  std::vector<int> order(static_cast<std::size_t>(cells));
  std::iota(order.begin(), order.end(), 0);
  // Partial Fisher-Yates over the first N + L cells.
  const int needed = config_.n_agents + config_.n_foods;
  for (int k = 0; k < needed; ++k) {
    const auto pick = k + static_cast<int>(rng_.index(static_cast<std::size_t>(cells - k)));
    std::swap(order[k], order[pick]);
  }
  state_ = ForagingState{};
  for (int k = 0; k < needed; ++k) {
    const Cell cell{order[k] % config_.grid, order[k] / config_.grid};
    if (k < config_.n_agents) {
      state_.agents.push_back(cell);
    } else {
      state_.foods.push_back(cell);
    }
  }
  return make_step(std::vector<double>(static_cast<std::size_t>(config_.n_agents), 0.0));
}

EnvStep ForagingEnv::step(std::span<const int> actions) {
  auto rewards = foraging_transition(config_, state_, actions);
  return make_step(std::move(rewards));
}

}  // namespace ltos
