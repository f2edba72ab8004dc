#ifndef LTOS_EXECUTION_HPP
#define LTOS_EXECUTION_HPP

#include <exception>

namespace ltos {

// Serial is the reference path; Parallel runs the per-agent loops under
// OpenMP and must agree with Serial bit for bit.
enum class Execution { kSerial, kParallel };

// Calls fn(i) for i in [0, n). Iterations must touch disjoint state. The
// first exception thrown by any iteration is rethrown after the loop.
template <typename Fn>
void for_each_index(int n, Execution exec, Fn&& fn) {
  if (exec == Execution::kSerial) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(ltos_for_each_index)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace ltos

#endif  // LTOS_EXECUTION_HPP
