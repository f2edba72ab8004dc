#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ltos/reward_sharing.hpp"
#include "support/generators.hpp"

using namespace ltos;

namespace {

SharingGraph line3() {
  const std::vector<Edge> edges{{0, 1}, {1, 2}};
  return build_graph(3, edges, 2);
}

WeightAssignment line3_weights() {
  WeightAssignment w;
  w.out = {Keyed{{0, 1}, {0.7, 0.3}}, Keyed{{0, 1, 2}, {0.2, 0.5, 0.3}},
           Keyed{{1, 2}, {0.4, 0.6}}};
  return w;
}

// Shaped rewards straight from the definition, one receiver at a time.
std::vector<double> shaped_by_definition(const SharingGraph& g, const WeightAssignment& w,
                                         const std::vector<double>& raw) {
  std::vector<double> out(raw.size(), 0.0);
  for (AgentId i = 0; i < g.n_agents(); ++i) {
    for (AgentId j : g.neighborhood(i)) out[i] += w.weight(j, i) * raw[j];
  }
  return out;
}

}  // namespace

TEST_SUITE("reward_sharing") {
  TEST_CASE("identity sharing returns the raw rewards") {
    const auto g = line3();
    const std::vector<double> raw{1.5, -2.0, 0.25};
    CHECK(share_rewards(g, identity_weights(g), raw) == raw);
    CHECK(selfishness(identity_weights(g)) == std::vector<double>{1.0, 1.0, 1.0});
  }

  TEST_CASE("two agents splitting evenly") {
    const auto g = fully_connected(2);
    const std::vector<double> raw{1.0, 0.0};
    const auto r = share_rewards(g, uniform_weights(g), raw);
    CHECK(r[0] == doctest::Approx(0.5));
    CHECK(r[1] == doctest::Approx(0.5));
  }

  TEST_CASE("three-agent line") {
    const std::vector<double> raw{1.0, 2.0, -1.0};
    const auto r = share_rewards(line3(), line3_weights(), raw);
    CHECK(r[0] == doctest::Approx(1.1).epsilon(1e-12));
    CHECK(r[1] == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(r[2] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r[0] + r[1] + r[2] == doctest::Approx(2.0).epsilon(1e-12));
    const auto s = selfishness(line3_weights());
    CHECK(s == std::vector<double>{0.7, 0.5, 0.6});
  }

  TEST_CASE("uniform weights over four members give selfishness 0.25") {
    const auto g = fully_connected(4);
    for (double s : selfishness(uniform_weights(g))) CHECK(s == doctest::Approx(0.25));
  }

  TEST_CASE("selfish weights split the remainder evenly") {
    const auto g = line3();
    const auto w = selfish_weights(g, 0.8);
    CHECK(w.weight(0, 0) == 0.8);
    CHECK(w.weight(0, 1) == doctest::Approx(0.2));
    CHECK(w.weight(1, 0) == doctest::Approx(0.1));
    CHECK(w.weight(1, 2) == doctest::Approx(0.1));
    validate_weights(g, w);
    const auto lonely = selfish_weights(build_graph(1, {}, 1), 0.5);
    CHECK(lonely.weight(0, 0) == 1.0);
    CHECK_THROWS_AS(selfish_weights(g, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(selfish_weights(g, 1.5), std::invalid_argument);
  }

  TEST_CASE("incoming weights transpose the outgoing ones") {
    const auto in = incoming_weights(line3(), line3_weights());
    CHECK(in[1].keys == std::vector<AgentId>{0, 1, 2});
    CHECK(in[1].values == std::vector<double>{0.3, 0.5, 0.4});
    CHECK(in[0].values == std::vector<double>{0.7, 0.2});
  }

  TEST_CASE("validation catches bad rows") {
    const auto g = line3();
    auto w = line3_weights();
    w.out[0].values = {0.7, 0.4};
    CHECK_THROWS_AS(validate_weights(g, w), std::invalid_argument);
    w = line3_weights();
    w.out[2].values = {1.2, -0.2};
    CHECK_THROWS_AS(validate_weights(g, w), std::invalid_argument);
    w = line3_weights();
    w.out[2].keys = {0, 2};
    CHECK_THROWS_AS(validate_weights(g, w), std::invalid_argument);
    w = line3_weights();
    w.out[0].values = {0.7 + 5e-7, 0.3};
    CHECK_NOTHROW(validate_weights(g, w));
    CHECK_THROWS_AS(share_rewards(g, line3_weights(), std::vector<double>{1.0, 2.0}),
                    std::invalid_argument);
  }

  TEST_CASE("property: shaped rewards match the definition and conserve the total") {
    Rng rng(21);
    for (int trial = 0; trial < 2000; ++trial) {
      const auto g = testing::random_graph(rng);
      const auto w = testing::random_weights(rng, g);
      const auto raw = testing::random_rewards(rng, g.n_agents());
      const auto shaped = share_rewards(g, w, raw);
      const auto expected = shaped_by_definition(g, w, raw);
      for (std::size_t i = 0; i < raw.size(); ++i) {
        REQUIRE(shaped[i] == doctest::Approx(expected[i]).epsilon(1e-12).scale(1e3));
      }
      const double sum_raw = std::accumulate(raw.begin(), raw.end(), 0.0);
      const double sum_shaped = std::accumulate(shaped.begin(), shaped.end(), 0.0);
      REQUIRE(std::abs(sum_shaped - sum_raw) <= 1e-9 * std::max(1.0, std::abs(sum_raw)));
    }
  }

  TEST_CASE("property: parallel gather equals serial scatter bit for bit") {
    Rng rng(23);
    for (int trial = 0; trial < 500; ++trial) {
      const auto g = testing::random_graph(rng);
      const auto w = testing::random_weights(rng, g);
      const auto raw = testing::random_rewards(rng, g.n_agents());
      REQUIRE(share_rewards(g, w, raw, Execution::kParallel) ==
              share_rewards(g, w, raw, Execution::kSerial));
    }
  }
}
