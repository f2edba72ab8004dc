#include "ltos/matrix_env.hpp"

#include <cmath>
#include <stdexcept>

namespace ltos {

MatrixGameEnv::MatrixGameEnv(MatrixGame game)
    : game_(game), graph_(std::make_shared<SharingGraph>(fully_connected(2))) {
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      if (!std::isfinite(game_.row[r][c]) || !std::isfinite(game_.col[r][c])) {
        throw std::invalid_argument("matrix game: non-finite payoff");
      }
    }
  }
}

EnvStep MatrixGameEnv::reset() {
  done_ = false;
  return EnvStep{{{1.0}, {1.0}}, {0.0, 0.0}, false, graph_};
}

EnvStep MatrixGameEnv::step(std::span<const int> actions) {
  if (done_) throw std::logic_error("matrix game: step after episode end");
  if (actions.size() != 2 || actions[0] < 0 || actions[0] > 1 || actions[1] < 0 ||
      actions[1] > 1) {
    throw std::invalid_argument("matrix game: expected two actions in {0,1}");
  }
  done_ = true;
  return EnvStep{{{1.0}, {1.0}},
                 {game_.row[actions[0]][actions[1]], game_.col[actions[0]][actions[1]]},
                 true,
                 graph_};
}

}  // namespace ltos
