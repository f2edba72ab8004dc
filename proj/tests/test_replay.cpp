#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ltos/replay.hpp"
#include "ltos/reward_sharing.hpp"

using namespace ltos;

namespace {

JointRecord make_record(std::uint64_t stamp, int n) {
  auto graph = std::make_shared<SharingGraph>(fully_connected(n));
  std::vector<std::vector<double>> obs, next;
  for (int i = 0; i < n; ++i) {
    obs.push_back({double(stamp), double(i)});
    next.push_back({double(stamp) + 1, double(i)});
  }
  JointRecord r;
  r.timestamp = stamp;
  r.obs = ObservationTable::from(obs);
  r.next_obs = ObservationTable::from(next);
  r.w_in = incoming_weights(*graph, uniform_weights(*graph));
  for (int i = 0; i < n; ++i) {
    r.actions.push_back(i);
    r.shaped_rewards.push_back(0.5 * i + double(stamp));
  }
  r.graph = graph;
  r.next_graph = graph;
  r.done = stamp % 4 == 3;
  return r;
}

}  // namespace

TEST_SUITE("replay") {
  TEST_CASE("views expose each agent's slice of a joint record") {
    ReplayBuffer buf(10, 3);
    buf.push(make_record(7, 3));
    const Transition t = buf.view(2, 0);
    CHECK(t.timestamp == 7);
    CHECK(t.o[1] == 2.0);
    CHECK(t.o_next[0] == 8.0);
    CHECK(t.a == 2);
    CHECK(t.r_w == 8.0);
    CHECK(t.neighbors.size() == 3);
    CHECK(t.w_in->keys == std::vector<AgentId>{0, 1, 2});
    CHECK(t.done);
    CHECK(t.joint_obs->of(0)[1] == 0.0);
    CHECK_THROWS_AS(buf.view(3, 0), std::out_of_range);
    CHECK_THROWS_AS(buf.view(0, 1), std::out_of_range);
  }

  TEST_CASE("ring eviction drops the oldest record") {
    ReplayBuffer buf(4, 2);
    for (std::uint64_t s = 0; s < 7; ++s) buf.push(make_record(s, 2));
    CHECK(buf.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) CHECK(buf.record(k).timestamp == 3 + k);
  }

  TEST_CASE("incomplete records are rejected") {
    ReplayBuffer buf(4, 3);
    CHECK_THROWS_AS(buf.push(make_record(0, 2)), std::invalid_argument);
    auto r = make_record(0, 3);
    r.shaped_rewards[1] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(buf.push(r), std::domain_error);
    CHECK_THROWS_AS(ReplayBuffer(0, 1), std::invalid_argument);
    Rng rng(1);
    CHECK_THROWS_AS(buf.sample(rng, 3), std::logic_error);
  }

  TEST_CASE("one draw addresses the same timestep for every agent") {
    ReplayBuffer buf(16, 4);
    for (std::uint64_t s = 0; s < 40; ++s) buf.push(make_record(s, 4));
    Rng rng(5);
    for (int draw = 0; draw < 100; ++draw) {
      const auto idx = buf.sample(rng, 10);
      for (std::size_t b : idx) {
        const auto stamp = buf.view(0, b).timestamp;
        for (AgentId i = 1; i < 4; ++i) REQUIRE(buf.view(i, b).timestamp == stamp);
      }
    }
  }

  TEST_CASE("sampling is uniform with replacement and reproducible") {
    ReplayBuffer buf(5, 1);
    for (std::uint64_t s = 0; s < 5; ++s) buf.push(make_record(s, 1));
    Rng a(9), b(9);
    CHECK(buf.sample(a, 50) == buf.sample(b, 50));
    std::map<std::size_t, int> counts;
    for (std::size_t k : buf.sample(a, 50000)) ++counts[k];
    CHECK(counts.size() == 5);
    for (auto [k, n] : counts) CHECK(n == doctest::Approx(10000).epsilon(0.05));
  }
}
