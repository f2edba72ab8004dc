#ifndef LTOS_TRAINER_HPP
#define LTOS_TRAINER_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ltos/config.hpp"
#include "ltos/environment.hpp"
#include "ltos/high_policy.hpp"
#include "ltos/metrics.hpp"
#include "ltos/q_network.hpp"
#include "ltos/replay.hpp"
#include "ltos/reward_sharing.hpp"
#include "ltos/rng.hpp"

namespace ltos {

// kLtos learns the sharing policies; kFixed freezes w_ii = s0 with the rest
// spread evenly over neighbors; kIndependent keeps w_ii = 1.
enum class Method { kLtos, kFixed, kIndependent };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

// Learners and per-agent generators owned by one agent.
struct AgentModels {
  QNetwork q;
  QNetwork q_target;
  QOptimizer q_opt;
  HighPolicy phi;
  HighPolicy phi_target;
  Optimizer phi_opt;
  NoiseProcess noise;
  Rng explore;
  Rng noise_rng;
};

// What happened during one rollout step, handed to TrainerHooks::on_step.
struct StepTrace {
  std::uint64_t step = 0;
  std::uint64_t episode = 0;
  const std::vector<std::vector<double>>* observations = nullptr;
  const SharingGraph* graph = nullptr;
  const WeightAssignment* weights = nullptr;
  std::span<const int> actions;
  std::span<const double> raw_rewards;
  std::span<const double> shaped_rewards;
};

struct TrainerHooks {
  std::function<void(const StepTrace&)> on_step;
  // Timestamps of the transitions one agent trained on in one low-level
  // update, in draw order.
  std::function<void(AgentId, std::span<const std::uint64_t>)> on_sample;
};

struct UpdateResult {
  bool low = false;
  bool high = false;
  std::vector<double> losses;  // per agent, pre-step
};

struct TraceRow {
  int t = 0;
  AgentId agent = 0;
  std::vector<double> obs;
  int action = 0;
  double reward = 0.0;
};

// CSV header `t,agent,obs0..obsK,action,reward`.
void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows);

class Trainer {
 public:
  Trainer(RunConfig config, Method method, std::uint64_t seed);

  const RunConfig& config() const { return config_; }
  Method method() const { return method_; }
  int n_agents() const { return n_agents_; }
  std::uint64_t steps() const { return steps_; }
  std::uint64_t episodes() const { return episode_; }
  double epsilon() const;

  void set_hooks(TrainerHooks hooks) { hooks_ = std::move(hooks); }

  // Advances the current episode by one environment step (starting one if
  // none is active) and stores the joint transition. Returns true on the
  // episode's last step.
  bool rollout_step();

  // Low-level descent followed, when scheduled, by the high-level ascent,
  // then target blending. No-op while the buffer is below sample size.
  UpdateResult update_step();

  // Runs one training episode; returns false when the step budget ran out
  // before the episode ended (no record is produced then).
  bool run_episode(EpisodeRecord& record);

  // Greedy low level, noise-free high level, on a dedicated environment.
  EvalRecord evaluate(std::vector<TraceRow>* trace = nullptr);

  // Runs config.episodes episodes (or until max_steps), evaluating every
  // eval_interval episodes and once at the end.
  MetricsTable train();
  // Same, filling `table` as it goes so a failure leaves partial metrics.
  void train(MetricsTable& table);

  // Sharing weights the method would use at (obs, graph). `explore` adds
  // the agents' exploration noise; `target` uses the target policies.
  WeightAssignment sharing_weights(const std::vector<std::vector<double>>& obs,
                                   const SharingGraph& graph, bool explore, bool target);
  WeightAssignment sharing_weights(const ObservationTable& obs, const SharingGraph& graph,
                                   bool target) const;

  std::vector<AgentModels>& agents() { return agents_; }
  const std::vector<AgentModels>& agents() const { return agents_; }
  const ReplayBuffer& buffer() const { return buffer_; }

  // <dir>/<agent>/{q,phi,q_target,phi_target}.bin
  void save_checkpoint(const std::string& dir) const;
  void load_checkpoint(const std::string& dir);

 private:
  bool high_update_due() const;
  void low_update(UpdateResult& result);
  void high_update();
  void begin_episode();

  RunConfig config_;
  Method method_;
  std::uint64_t seed_;
  std::unique_ptr<Environment> env_;
  std::unique_ptr<Environment> eval_env_;
  int n_agents_ = 0;
  std::vector<AgentModels> agents_;
  ReplayBuffer buffer_;
  Rng sample_rng_;
  TrainerHooks hooks_;

  std::uint64_t steps_ = 0;
  std::uint64_t episode_ = 0;  // completed training episodes
  bool active_ = false;
  int episode_t_ = 0;
  EnvStep current_;
  WeightAssignment held_;
  int held_for_ = 0;

  // running sums for the episode in progress
  std::vector<double> ep_return_;
  std::vector<double> ep_selfish_;
  std::vector<double> ep_loss_;
  std::vector<std::uint64_t> ep_loss_count_;
  double max_conservation_error_ = 0.0;
};

}  // namespace ltos

#endif  // LTOS_TRAINER_HPP
