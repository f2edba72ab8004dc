#include "ltos/prisoner.hpp"

#include <stdexcept>

namespace ltos {
namespace {

bool is_goal(int pos, int end) { return pos == -end || pos == 0 || pos == end; }

int move(int pos, int action) {
  if (action == kMoveLeft) return pos - 1;
  if (action == kMoveRight) return pos + 1;
  throw std::invalid_argument("prisoner: action " + std::to_string(action) +
                              " is not left(0) or right(1)");
}

}  // namespace

void validate(const PrisonerConfig& config) {
  if (config.corridor_end < 2) {
    throw std::invalid_argument("prisoner: corridor_end must be >= 2, got " +
                                std::to_string(config.corridor_end));
  }
  if (config.horizon < 0) throw std::invalid_argument("prisoner: negative horizon");
  if (!(config.step_cost >= 0.0)) throw std::invalid_argument("prisoner: negative step cost");
}

std::vector<PrisonerOutcome> prisoner_transitions(const PrisonerConfig& config,
                                                  const PrisonerState& state,
                                                  std::array<int, 2> actions) {
  if (state.done) throw std::logic_error("prisoner: step after episode end");
  const int end = config.corridor_end;
  PrisonerState next = state;
  next.pos_a = move(state.pos_a, actions[0]);
  next.pos_b = move(state.pos_b, actions[1]);
  next.t = state.t + 1;
  const bool goal_a = is_goal(next.pos_a, end);
  const bool goal_b = is_goal(next.pos_b, end);
  next.done = goal_a || goal_b || next.t >= config.horizon;

  const double cost = -config.step_cost;
  if (goal_a && goal_b && next.pos_a == next.pos_b) {
    PrisonerOutcome a_wins{0.5, next, {cost + 1.0, cost}};
    PrisonerOutcome b_wins{0.5, next, {cost, cost + 1.0}};
    return {a_wins, b_wins};
  }
  PrisonerOutcome only{1.0, next, {cost + (goal_a ? 1.0 : 0.0), cost + (goal_b ? 1.0 : 0.0)}};
  return {only};
}

std::vector<std::vector<double>> prisoner_observations(const PrisonerConfig& config,
                                                       const PrisonerState& state) {
  const double scale = static_cast<double>(config.corridor_end);
  const double a = state.pos_a / scale;
  const double b = state.pos_b / scale;
  return {{a, b}, {-b, -a}};
}

PrisonerEnv::PrisonerEnv(PrisonerConfig config, std::uint64_t seed)
    : config_(config), rng_(seed, 0x9e1), graph_(std::make_shared<SharingGraph>(fully_connected(2))) {
  validate(config_);
}

EnvStep PrisonerEnv::make_step(std::vector<double> rewards) const {
  EnvStep out;
  out.observations = prisoner_observations(config_, state_);
  out.rewards = std::move(rewards);
  out.done = state_.done;
  out.graph = graph_;
  return out;
}

EnvStep PrisonerEnv::reset() {
  state_ = PrisonerState{};
  return make_step({0.0, 0.0});
}

EnvStep PrisonerEnv::step(std::span<const int> actions) {
  if (actions.size() != 2) throw std::invalid_argument("prisoner: expected 2 actions");
  auto outcomes = prisoner_transitions(config_, state_, {actions[0], actions[1]});
  std::size_t pick = 0;
  if (outcomes.size() == 2) pick = rng_.bernoulli(0.5) ? 0 : 1;
  state_ = outcomes[pick].next;
  return make_step({outcomes[pick].rewards[0], outcomes[pick].rewards[1]});
}

}  // namespace ltos
