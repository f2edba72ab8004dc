#ifndef LTOS_OPTIMIZER_HPP
#define LTOS_OPTIMIZER_HPP

#include <span>
#include <string>

#include "ltos/mlp.hpp"

namespace ltos {

enum class OptimizerKind { kSgd, kAdam };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(const std::string& name);

// One parameter buffer's optimizer. Always a descent step; callers that
// ascend pass the negated gradient.
struct Optimizer {
  OptimizerKind kind = OptimizerKind::kAdam;
  double lr = 1e-3;
  AdamState adam;

  void descend(std::span<double> params, std::span<const double> grads) {
    if (kind == OptimizerKind::kSgd) {
      sgd_step(params, grads, lr);
    } else {
      adam_step(params, grads, lr, adam);
    }
  }
};

}  // namespace ltos

#endif  // LTOS_OPTIMIZER_HPP
