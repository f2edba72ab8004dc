#ifndef LTOS_METRICS_HPP
#define LTOS_METRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ltos {

// One training episode, per agent: undiscounted raw return, mean raw reward
// per step, mean emitted selfishness w_ii, mean Q loss over the updates run
// during the episode (NaN when none ran).
struct EpisodeRecord {
  std::uint64_t episode = 0;
  std::uint64_t step = 0;  // global step count when the episode ended
  std::uint64_t length = 0;
  std::vector<double> returns;
  std::vector<double> rewards;
  std::vector<double> selfishness;
  std::vector<double> q_loss;

  double average_return() const;
  double average_reward() const;
};

// Greedy, noise-free evaluation after `episode` training episodes.
struct EvalRecord {
  std::uint64_t episode = 0;
  std::uint64_t step = 0;
  double average_return = 0.0;  // mean over agents and evaluation episodes
  double average_reward = 0.0;  // per agent per step
};

struct MetricsTable {
  std::vector<EpisodeRecord> episodes;
  std::vector<EvalRecord> evals;
  std::uint64_t steps = 0;
  double max_conservation_error = 0.0;
};

// Header `episode,step,agent,return,reward,selfishness,q_loss`, one row per
// agent per episode. Reals use %.17g so equal runs give equal bytes.
void write_metrics_csv(std::ostream& out, const MetricsTable& table);
void write_eval_csv(std::ostream& out, const MetricsTable& table);

// Per episode present in every run: mean, min and max across runs of the
// episode's average return.
void write_aggregate_csv(std::ostream& out, std::span<const MetricsTable> runs);
void write_eval_aggregate_csv(std::ostream& out, std::span<const MetricsTable> runs);

// Mean of the last ceil(fraction * n) evaluation returns. Throws on an empty
// evaluation series.
double final_window_return(const MetricsTable& table, double fraction = 0.1);
double final_window_reward(const MetricsTable& table, double fraction = 0.1);

// Training episodes completed at the first evaluation reaching `threshold`.
std::optional<std::uint64_t> episodes_to_threshold(const MetricsTable& table, double threshold);

std::string format_real(double v);

}  // namespace ltos

#endif  // LTOS_METRICS_HPP
