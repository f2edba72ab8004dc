#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ltos/topology.hpp"
#include "support/generators.hpp"

using namespace ltos;

namespace {

std::vector<AgentId> hood(const SharingGraph& g, AgentId i) {
  auto n = g.neighborhood(i);
  return {n.begin(), n.end()};
}

}  // namespace

TEST_SUITE("topology") {
  TEST_CASE("two connected agents share both ways and keep self-loops") {
    const std::vector<Edge> edges{{0, 1}};
    const auto g = build_graph(2, edges, 3);
    const std::vector<Edge> directed{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    CHECK(g.directed_edges() == directed);
    CHECK(hood(g, 0) == std::vector<AgentId>{0, 1});
    CHECK(g.directed_edge_count() == 4);
  }

  TEST_CASE("an isolated agent owns only its self-loop") {
    const auto g = build_graph(1, {}, 3);
    CHECK(g.directed_edges() == std::vector<Edge>{{0, 0}});
    CHECK(hood(g, 0) == std::vector<AgentId>{0});
  }

  TEST_CASE("a three-agent line") {
    const std::vector<Edge> edges{{0, 1}, {1, 2}};
    const auto g = build_graph(3, edges, 3);
    CHECK(hood(g, 0) == std::vector<AgentId>{0, 1});
    CHECK(hood(g, 1) == std::vector<AgentId>{0, 1, 2});
    CHECK(hood(g, 2) == std::vector<AgentId>{1, 2});
    CHECK(g.slot_of(1, 2) == 2);
    CHECK(g.slot_of(0, 2) == -1);
    CHECK_FALSE(g.adjacent(0, 2));
  }

  TEST_CASE("edge orientation does not matter") {
    const std::vector<Edge> a{{1, 0}, {2, 1}};
    const std::vector<Edge> b{{0, 1}, {1, 2}};
    CHECK(build_graph(3, a, 2) == build_graph(3, b, 2));
  }

  TEST_CASE("malformed edge sets are rejected") {
    const std::vector<Edge> self_edge{{0, 0}};
    const std::vector<Edge> out_of_range{{0, 3}};
    const std::vector<Edge> duplicate{{0, 1}, {1, 0}};
    const std::vector<Edge> star{{0, 1}, {0, 2}, {0, 3}};
    CHECK_THROWS_AS(build_graph(2, self_edge, 3), std::invalid_argument);
    CHECK_THROWS_AS(build_graph(3, out_of_range, 3), std::invalid_argument);
    CHECK_THROWS_AS(build_graph(2, duplicate, 3), std::invalid_argument);
    CHECK_THROWS_AS(build_graph(4, star, 2), std::invalid_argument);
  }

  TEST_CASE("nearest neighbors on a line take the symmetric closure") {
    // 2's nearest is 1, so closure adds 1-2 even though 1 prefers 0.
    const std::vector<Vec2> points{{0, 0}, {1, 0}, {5, 0}};
    const auto g = knn_neighborhoods(points, 1);
    CHECK(hood(g, 0) == std::vector<AgentId>{0, 1});
    CHECK(hood(g, 1) == std::vector<AgentId>{0, 1, 2});
    CHECK(hood(g, 2) == std::vector<AgentId>{1, 2});
  }

  TEST_CASE("nearest neighbors degenerate to complete graphs") {
    const std::vector<Vec2> pair{{0, 0}, {3, 4}};
    CHECK(knn_neighborhoods(pair, 1) == fully_connected(2));
    const std::vector<Vec2> square{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    CHECK(knn_neighborhoods(square, 3) == fully_connected(4));
  }

  TEST_CASE("distance ties go to the lower id") {
    const std::vector<Vec2> points{{-1, 0}, {0, 0}, {1, 0}};
    const auto g = knn_neighborhoods(points, 1);
    // agent 1 is equidistant from 0 and 2 and picks 0; 2 picks 1.
    CHECK(g.undirected_edges() == std::vector<Edge>{{0, 1}, {1, 2}});
  }

  TEST_CASE("text round trip") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      const auto g = testing::random_graph(rng);
      std::stringstream io;
      write_graph(io, g);
      CHECK(read_graph(io) == g);
    }
  }

  TEST_CASE("read_graph rejects truncated input") {
    std::stringstream io("3 2\n0 1\n1");
    CHECK_THROWS(read_graph(io));
  }

  TEST_CASE("property: neighborhoods are symmetric, sorted, contain self, respect k_max") {
    Rng rng(11);
    for (int trial = 0; trial < 500; ++trial) {
      const auto g = testing::random_graph(rng);
      std::size_t directed = 0;
      for (AgentId i = 0; i < g.n_agents(); ++i) {
        const auto h = hood(g, i);
        REQUIRE(std::is_sorted(h.begin(), h.end()));
        REQUIRE(std::set<AgentId>(h.begin(), h.end()).size() == h.size());
        REQUIRE(g.adjacent(i, i));
        REQUIRE(static_cast<int>(h.size()) - 1 <= g.k_max());
        for (AgentId j : h) REQUIRE(g.adjacent(j, i));
        directed += h.size();
      }
      CHECK(g.directed_edge_count() == directed);
      CHECK(directed == static_cast<std::size_t>(g.n_agents()) + 2 * g.undirected_edges().size());
    }
  }

  TEST_CASE("property: kNN gives every agent at least min(k, n-1) neighbors") {
    Rng rng(13);
    for (int trial = 0; trial < 300; ++trial) {
      const int n = 1 + static_cast<int>(rng.index(10));
      const int k = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
      std::vector<Vec2> points;
      for (int i = 0; i < n; ++i) points.push_back({std::floor(rng.uniform(0, 6)), std::floor(rng.uniform(0, 6))});
      const auto g = knn_neighborhoods(points, k);
      for (AgentId i = 0; i < n; ++i) {
        CHECK(static_cast<int>(g.neighborhood(i).size()) - 1 >= std::min(k, n - 1));
      }
    }
  }
}
