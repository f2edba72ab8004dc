#ifndef LTOS_FORAGING_HPP
#define LTOS_FORAGING_HPP

#include <memory>
#include <vector>

#include "ltos/environment.hpp"
#include "ltos/rng.hpp"

namespace ltos {

enum ForagingAction : int {
  kUp = 0,
  kDown,
  kLeft,
  kRight,
  kAttackUp,
  kAttackDown,
  kAttackLeft,
  kAttackRight,
  kForagingActionCount
};

inline constexpr double kFoodReward = 1.0;
inline constexpr double kAttackerReward = 2.0;
inline constexpr double kVictimReward = -4.0;
inline constexpr double kBlankAttackReward = -0.01;

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
};

struct ForagingState {
  std::vector<Cell> agents;
  std::vector<Cell> foods;
  int t = 0;
  bool done = false;
};

void validate(const ForagingConfig& config);

// Own position, then offsets to the nearest food_slots foods, then offsets
// to the k nearest agents; everything divided by the grid size and
// zero-padded to a fixed width. Slots ordered by distance, then id.
std::vector<std::vector<double>> foraging_observations(const ForagingConfig& config,
                                                       const ForagingState& state);

// Per-step average reward an agent team could reach if every agent walked
// straight to its closest food and attacked it for the rest of the episode.
double foraging_upper_bound(const ForagingConfig& config, const ForagingState& state);

// Simultaneous resolution; returns the per-agent rewards and advances state.
std::vector<double> foraging_transition(const ForagingConfig& config, ForagingState& state,
                                        std::span<const int> actions);

class ForagingEnv final : public Environment {
 public:
  ForagingEnv(ForagingConfig config, std::uint64_t seed);

  std::string name() const override { return "foraging"; }
  int n_agents() const override { return config_.n_agents; }
  int n_actions() const override { return kForagingActionCount; }
  std::size_t observation_size() const override;
  int k_max() const override { return std::max(0, config_.n_agents - 1); }

  EnvStep reset() override;
  EnvStep step(std::span<const int> actions) override;

  const ForagingState& state() const { return state_; }
  const ForagingConfig& config() const { return config_; }

 private:
  EnvStep make_step(std::vector<double> rewards) const;

  ForagingConfig config_;
  Rng rng_;
  ForagingState state_;
};

}  // namespace ltos

#endif  // LTOS_FORAGING_HPP
