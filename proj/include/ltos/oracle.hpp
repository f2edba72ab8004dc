#ifndef LTOS_ORACLE_HPP
#define LTOS_ORACLE_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "ltos/config.hpp"
#include "ltos/environment.hpp"
#include "ltos/metrics.hpp"
#include "ltos/prisoner.hpp"

namespace ltos {

// Centralized view of the corridor: joint states (pos_a, pos_b) reachable
// from the start, plus one absorbing terminal, under the four joint actions
// 2 * a_A + a_B. The time index is dropped; the horizon is applied when a
// policy is evaluated.
struct JointMDP {
  struct Outcome {
    double probability = 0.0;
    int next = 0;
    std::array<double, 2> rewards{};
  };

  PrisonerConfig config;
  std::vector<PrisonerState> states;  // non-terminal
  std::vector<std::array<std::vector<Outcome>, 4>> transitions;
  int start = 0;

  int terminal() const { return static_cast<int>(states.size()); }
  int n_states() const { return static_cast<int>(states.size()) + 1; }
};

JointMDP build_prisoner_mdp(const PrisonerConfig& config);

struct ValueIterationResult {
  std::vector<double> values;   // V*, terminal last
  std::vector<int> policy;      // joint action per non-terminal state
  std::vector<double> residuals;
  int iterations = 0;
  double optimal_return = 0.0;  // per-agent undiscounted return of `policy`
};

// Bellman optimality iteration on the summed reward. Throws
// std::invalid_argument for tol <= 0 or gamma outside [0,1], and
// std::runtime_error past max_iterations.
ValueIterationResult value_iterate(const JointMDP& mdp, double gamma, double tol,
                                   int max_iterations = 100000);

// Expected undiscounted per-agent returns over the corridor horizon when
// every state plays policy[s].
std::array<double, 2> evaluate_joint_policy(const JointMDP& mdp, const std::vector<int>& policy);

// Payoffs of the one-shot game where each agent commits to cooperate
// (index 0: walk to its own end) or defect (index 1: head for the middle).
MatrixGame prisoner_payoff_matrix(const PrisonerConfig& config);

using Profile = std::pair<int, int>;

struct MatrixAnalysis {
  std::vector<Profile> nash;
  std::vector<Profile> welfare_optimal;
  bool dilemma = false;  // unique Nash profile that is not welfare-optimal
};

MatrixAnalysis analyze_matrix_game(const MatrixGame& game);

// Header `optimal_return,n_states,iterations`.
void write_oracle_csv(std::ostream& out, const ValueIterationResult& result, int n_states);

// Mean over agents of max(0, H - (d_i - 1)) / H, averaged over the first
// `layouts` initial states an environment seeded with `seed` draws.
double foraging_seed_upper_bound(const ForagingConfig& config, std::uint64_t seed,
                                 int layouts = 100);

MetricsTable independent_q(const RunConfig& config, std::uint64_t seed);
MetricsTable fixed_ltos(const RunConfig& config, double s0, std::uint64_t seed);

// Selfishness values searched for the fixed-weight baseline.
std::vector<double> selfishness_grid();

}  // namespace ltos

#endif  // LTOS_ORACLE_HPP
