#ifndef LTOS_MATRIX_ENV_HPP
#define LTOS_MATRIX_ENV_HPP

#include "ltos/environment.hpp"

namespace ltos {

// One-shot 2x2 game behind the environment contract. Observation is a
// constant 1 for both players; the episode ends after one joint move.
class MatrixGameEnv final : public Environment {
 public:
  explicit MatrixGameEnv(MatrixGame game);

  std::string name() const override { return "matrix"; }
  int n_agents() const override { return 2; }
  int n_actions() const override { return 2; }
  std::size_t observation_size() const override { return 1; }
  int k_max() const override { return 1; }

  EnvStep reset() override;
  EnvStep step(std::span<const int> actions) override;

 private:
  MatrixGame game_;
  bool done_ = false;
  std::shared_ptr<const SharingGraph> graph_;
};

}  // namespace ltos

#endif  // LTOS_MATRIX_ENV_HPP
