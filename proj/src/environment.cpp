#include "ltos/environment.hpp"

#include <stdexcept>

#include "ltos/foraging.hpp"
#include "ltos/matrix_env.hpp"
#include "ltos/prisoner.hpp"

namespace ltos {

std::unique_ptr<Environment> make_environment(const EnvConfig& config, std::uint64_t seed) {
  switch (config.kind) {
    case EnvKind::kPrisoner:
      return std::make_unique<PrisonerEnv>(config.prisoner, seed);
    case EnvKind::kForaging:
      return std::make_unique<ForagingEnv>(config.foraging, seed);
    case EnvKind::kMatrix:
      return std::make_unique<MatrixGameEnv>(config.matrix);
  }
  throw std::invalid_argument("make_environment: unknown kind");
}

std::string to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::kPrisoner:
      return "prisoner";
    case EnvKind::kForaging:
      return "foraging";
    case EnvKind::kMatrix:
      return "matrix";
  }
  return "?";
}

EnvKind env_kind_from_string(const std::string& name) {
  if (name == "prisoner") return EnvKind::kPrisoner;
  if (name == "foraging" || name == "jungle") return EnvKind::kForaging;
  if (name == "matrix") return EnvKind::kMatrix;
  throw std::invalid_argument("unknown environment '" + name + "'");
}

}  // namespace ltos
