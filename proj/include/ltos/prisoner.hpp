#ifndef LTOS_PRISONER_HPP
#define LTOS_PRISONER_HPP

#include <array>
#include <memory>
#include <vector>

#include "ltos/environment.hpp"
#include "ltos/rng.hpp"

namespace ltos {

// Two agents in a corridor of cells [-E, +E] with goals at both ends and in
// the middle. A starts at -1, B at +1. Heading for the middle is "defect",
// walking to one's own end is "cooperate".
enum PrisonerAction : int { kMoveLeft = 0, kMoveRight = 1 };

struct PrisonerState {
  int pos_a = -1;
  int pos_b = 1;
  int t = 0;
  bool done = false;

  bool operator==(const PrisonerState&) const = default;
};

struct PrisonerOutcome {
  double probability = 1.0;
  PrisonerState next;
  std::array<double, 2> rewards{};
};

// Every possible result of one joint move; two equally likely outcomes on a
// middle-goal collision (A wins, then B wins), otherwise one.
std::vector<PrisonerOutcome> prisoner_transitions(const PrisonerConfig& config,
                                                  const PrisonerState& state,
                                                  std::array<int, 2> actions);

// Agent-centric view: own position first, mirrored for B so that each agent
// sees its own start on the negative side. Normalized by E.
std::vector<std::vector<double>> prisoner_observations(const PrisonerConfig& config,
                                                       const PrisonerState& state);

void validate(const PrisonerConfig& config);

class PrisonerEnv final : public Environment {
 public:
  PrisonerEnv(PrisonerConfig config, std::uint64_t seed);

  std::string name() const override { return "prisoner"; }
  int n_agents() const override { return 2; }
  int n_actions() const override { return 2; }
  std::size_t observation_size() const override { return 2; }
  int k_max() const override { return 1; }

  EnvStep reset() override;
  EnvStep step(std::span<const int> actions) override;

  const PrisonerState& state() const { return state_; }
  const PrisonerConfig& config() const { return config_; }

 private:
  EnvStep make_step(std::vector<double> rewards) const;

  PrisonerConfig config_;
  Rng rng_;
  PrisonerState state_;
  std::shared_ptr<const SharingGraph> graph_;
};

}  // namespace ltos

#endif  // LTOS_PRISONER_HPP
