#ifndef LTOS_ENVIRONMENT_HPP
#define LTOS_ENVIRONMENT_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ltos/topology.hpp"

namespace ltos {

// One environment tick: per-agent observations and raw rewards, the
// termination flag, and the sharing graph valid for the observations.
struct EnvStep {
  std::vector<std::vector<double>> observations;
  std::vector<double> rewards;
  bool done = false;
  std::shared_ptr<const SharingGraph> graph;
};

class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual int n_agents() const = 0;
  virtual int n_actions() const = 0;
  virtual std::size_t observation_size() const = 0;
  // Upper bound on |N_i| - 1 over every graph this environment can emit.
  virtual int k_max() const = 0;

  virtual EnvStep reset() = 0;
  // Throws std::logic_error when called after the episode ended.
  virtual EnvStep step(std::span<const int> actions) = 0;
};

enum class EnvKind { kPrisoner, kForaging, kMatrix };

struct PrisonerConfig {
  int corridor_end = 4;  // goals at -E, 0, +E
  double step_cost = 0.01;
  int horizon = 50;

  bool operator==(const PrisonerConfig&) const = default;
};

struct ForagingConfig {
  int grid = 10;
  int n_agents = 8;
  int n_foods = 5;
  int k_neighbors = 3;
  int horizon = 120;
  int food_slots = 3;
  bool food_consumed = false;

  bool operator==(const ForagingConfig&) const = default;
};

// Payoffs indexed [row action][column action].
struct MatrixGame {
  std::array<std::array<double, 2>, 2> row{};
  std::array<std::array<double, 2>, 2> col{};

  bool operator==(const MatrixGame&) const = default;
};

struct EnvConfig {
  EnvKind kind = EnvKind::kPrisoner;
  PrisonerConfig prisoner;
  ForagingConfig foraging;
  MatrixGame matrix;

  bool operator==(const EnvConfig&) const = default;
};

std::unique_ptr<Environment> make_environment(const EnvConfig& config, std::uint64_t seed);

std::string to_string(EnvKind kind);
EnvKind env_kind_from_string(const std::string& name);

}  // namespace ltos

#endif  // LTOS_ENVIRONMENT_HPP
