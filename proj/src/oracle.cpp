#include "ltos/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include "ltos/foraging.hpp"
#include "ltos/trainer.hpp"

namespace ltos {
namespace {

std::array<int, 2> split(int joint) { return {joint >> 1, joint & 1}; }

}  // namespace

JointMDP build_prisoner_mdp(const PrisonerConfig& config) {
  validate(config);
  JointMDP mdp;
  mdp.config = config;
  PrisonerConfig timeless = config;
  timeless.horizon = std::numeric_limits<int>::max();

  std::map<std::pair<int, int>, int> index;
  std::deque<PrisonerState> frontier;
  const PrisonerState start{};
  index[{start.pos_a, start.pos_b}] = 0;
  mdp.states.push_back(start);
  frontier.push_back(start);
  while (!frontier.empty()) {
    const PrisonerState s = frontier.front();
    frontier.pop_front();
    for (int joint = 0; joint < 4; ++joint) {
      for (const auto& o : prisoner_transitions(timeless, s, split(joint))) {
        if (o.next.done) continue;
        const std::pair<int, int> key{o.next.pos_a, o.next.pos_b};
        if (index.emplace(key, static_cast<int>(mdp.states.size())).second) {
          PrisonerState fresh{};
          fresh.pos_a = key.first;
          fresh.pos_b = key.second;
          mdp.states.push_back(fresh);
          frontier.push_back(fresh);
        }
      }
    }
  }

  const int terminal = mdp.terminal();
  mdp.transitions.resize(mdp.states.size());
  for (std::size_t s = 0; s < mdp.states.size(); ++s) {
    for (int joint = 0; joint < 4; ++joint) {
      for (const auto& o : prisoner_transitions(timeless, mdp.states[s], split(joint))) {
        const int next = o.next.done ? terminal : index.at({o.next.pos_a, o.next.pos_b});
        mdp.transitions[s][joint].push_back({o.probability, next, o.rewards});
      }
    }
  }
  mdp.start = 0;
  return mdp;
}

ValueIterationResult value_iterate(const JointMDP& mdp, double gamma, double tol,
                                   int max_iterations) {
  if (!(tol > 0.0)) throw std::invalid_argument("value_iterate: tol must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("value_iterate: gamma must be in [0,1]");
  }
  const std::size_t n = mdp.states.size();
  ValueIterationResult out;
  out.values.assign(n + 1, 0.0);
  out.policy.assign(n, 0);

  auto backup = [&](std::size_t s, int joint, const std::vector<double>& v) {
    double q = 0.0;
    for (const auto& o : mdp.transitions[s][joint]) {
      q += o.probability * (o.rewards[0] + o.rewards[1] + gamma * v[o.next]);
    }
    return q;
  };

  std::vector<double> next(n + 1, 0.0);
  for (;;) {
    if (out.iterations >= max_iterations) {
      throw std::runtime_error("value_iterate: no convergence after " +
                               std::to_string(max_iterations) + " sweeps");
    }
    double residual = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int joint = 0; joint < 4; ++joint) best = std::max(best, backup(s, joint, out.values));
      next[s] = best;
      residual = std::max(residual, std::abs(best - out.values[s]));
    }
    next[n] = 0.0;
    out.values.swap(next);
    out.residuals.push_back(residual);
    ++out.iterations;
    if (residual < tol) break;
  }

  for (std::size_t s = 0; s < n; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (int joint = 0; joint < 4; ++joint) {
      const double q = backup(s, joint, out.values);
      if (q > best + 1e-12) {
        best = q;
        out.policy[s] = joint;
      }
    }
  }
  const auto returns = evaluate_joint_policy(mdp, out.policy);
  out.optimal_return = 0.5 * (returns[0] + returns[1]);
  return out;
}

std::array<double, 2> evaluate_joint_policy(const JointMDP& mdp, const std::vector<int>& policy) {
  if (policy.size() != mdp.states.size()) {
    throw std::invalid_argument("evaluate_joint_policy: one action per state required");
  }
  std::array<double, 2> total{};
  std::vector<double> mass(mdp.states.size(), 0.0);
  std::vector<double> next(mdp.states.size(), 0.0);
  mass[static_cast<std::size_t>(mdp.start)] = 1.0;
  for (int t = 0; t < mdp.config.horizon; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < mass.size(); ++s) {
      if (mass[s] == 0.0) continue;
      for (const auto& o : mdp.transitions[s][policy[s]]) {
        const double p = mass[s] * o.probability;
        total[0] += p * o.rewards[0];
        total[1] += p * o.rewards[1];
        if (o.next != mdp.terminal()) next[static_cast<std::size_t>(o.next)] += p;
      }
    }
    mass.swap(next);
  }
  return total;
}

MatrixGame prisoner_payoff_matrix(const PrisonerConfig& config) {
  const JointMDP mdp = build_prisoner_mdp(config);
  // Cooperation walks away from the middle: left for A, right for B.
  const std::array<int, 2> a_moves{kMoveLeft, kMoveRight};
  const std::array<int, 2> b_moves{kMoveRight, kMoveLeft};
  MatrixGame game;
  for (int ra = 0; ra < 2; ++ra) {
    for (int rb = 0; rb < 2; ++rb) {
      const int joint = 2 * a_moves[ra] + b_moves[rb];
      const std::vector<int> policy(mdp.states.size(), joint);
      const auto returns = evaluate_joint_policy(mdp, policy);
      game.row[ra][rb] = returns[0];
      game.col[ra][rb] = returns[1];
    }
  }
  return game;
}

MatrixAnalysis analyze_matrix_game(const MatrixGame& game) {
  MatrixAnalysis out;
  double best = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) best = std::max(best, game.row[r][c] + game.col[r][c]);
  }
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const bool row_ok = game.row[r][c] >= game.row[1 - r][c];
      const bool col_ok = game.col[r][c] >= game.col[r][1 - c];
      if (row_ok && col_ok) out.nash.emplace_back(r, c);
      if (game.row[r][c] + game.col[r][c] >= best - 1e-12) out.welfare_optimal.emplace_back(r, c);
    }
  }
  out.dilemma = out.nash.size() == 1 &&
                std::find(out.welfare_optimal.begin(), out.welfare_optimal.end(), out.nash[0]) ==
                    out.welfare_optimal.end();
  return out;
}

void write_oracle_csv(std::ostream& out, const ValueIterationResult& result, int n_states) {
  out << "optimal_return,n_states,iterations\n"
      << format_real(result.optimal_return) << ',' << n_states << ',' << result.iterations << '\n';
}

double foraging_seed_upper_bound(const ForagingConfig& config, std::uint64_t seed,
                                 int layouts) {
  if (layouts < 1) throw std::invalid_argument("foraging_seed_upper_bound: layouts must be >= 1");
  ForagingEnv env(config, seed);
  double sum = 0.0;
  for (int k = 0; k < layouts; ++k) {
    env.reset();
    sum += foraging_upper_bound(config, env.state());
  }
  return sum / layouts;
}

MetricsTable independent_q(const RunConfig& config, std::uint64_t seed) {
  Trainer trainer(config, Method::kIndependent, seed);
  return trainer.train();
}

MetricsTable fixed_ltos(const RunConfig& config, double s0, std::uint64_t seed) {
  RunConfig c = config;
  c.selfishness = s0;
  Trainer trainer(c, Method::kFixed, seed);
  return trainer.train();
}

std::vector<double> selfishness_grid() { return {0.5, 0.6, 0.7, 0.8, 0.9}; }

}  // namespace ltos
