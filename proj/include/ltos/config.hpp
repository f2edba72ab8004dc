#ifndef LTOS_CONFIG_HPP
#define LTOS_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "ltos/environment.hpp"
#include "ltos/execution.hpp"
#include "ltos/high_policy.hpp"
#include "ltos/mlp.hpp"
#include "ltos/optimizer.hpp"
#include "ltos/q_network.hpp"

namespace ltos {

enum class CadenceUnit { kStep, kEpisode };

std::string to_string(CadenceUnit unit);

// Full experiment description. Defaults are the corridor settings;
// foraging_defaults() gives the grid settings at desk scale.
struct RunConfig {
  EnvConfig env;

  double gamma = 0.99;
  double tau = 0.1;

  OptimizerKind low_optimizer = OptimizerKind::kAdam;
  double low_lr = 1e-3;
  OptimizerKind high_optimizer = OptimizerKind::kSgd;
  double high_lr = 1e-1;

  EpsilonSchedule epsilon{0.8, 1.0, 0.8};
  CadenceUnit epsilon_unit = CadenceUnit::kEpisode;

  NoiseSpec noise{NoiseKind::kEpsilonGaussian, 0.8, 1.0, 0.15};
  bool noise_scales_with_epsilon = false;  // OU sigma = sigma * current epsilon

  std::size_t batch_size = 10;
  std::size_t sample_size = 10;  // records required before low-level updates
  std::size_t high_batch_size = 32;
  std::size_t high_sample_size = 2000;
  std::size_t buffer_capacity = 200000;

  int update_every = 1;       // low-level update period in steps
  int high_update_every = 1;  // 0 disables high-level updates
  CadenceUnit high_update_unit = CadenceUnit::kStep;
  int action_interval = 1;    // steps a high-level decision is held
  double selfishness = 0.5;

  std::size_t hidden_units = 32;
  std::size_t high_hidden_units = 32;
  Init init = Init::kUniform;
  double init_stddev = 0.1;

  std::uint64_t episodes = 100000;
  std::uint64_t max_steps = 20000;  // training step budget; 0 = unlimited
  std::uint64_t eval_interval = 50;  // episodes between greedy evaluations
  std::uint64_t eval_episodes = 1;

  Execution execution = Execution::kSerial;

  bool operator==(const RunConfig&) const = default;
};

RunConfig prisoner_defaults();
RunConfig foraging_defaults();

// key=value lines, '#' starts a comment. An `env=` line selects the default
// settings; every other key overrides it. Throws std::invalid_argument on
// malformed lines, unknown or repeated keys, and out-of-range values.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_string(const std::string& text);

void validate(const RunConfig& config);

// Writes every key; parse_config(write_config(c)) == c.
void write_config(std::ostream& out, const RunConfig& config);
std::string write_config_string(const RunConfig& config);

}  // namespace ltos

#endif  // LTOS_CONFIG_HPP
