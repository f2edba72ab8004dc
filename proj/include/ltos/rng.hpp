#ifndef LTOS_RNG_HPP
#define LTOS_RNG_HPP

#include <cstddef>
#include <cstdint>
#include <random>

namespace ltos {

// Seeded generator. Independent streams are derived from (seed, stream) so
// the environment, exploration, noise and replay sampling never share state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);

  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  double normal(double mean = 0.0, double stddev = 1.0);
  std::size_t index(std::size_t n);  // uniform in [0, n)
  bool bernoulli(double p);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ltos

#endif  // LTOS_RNG_HPP
