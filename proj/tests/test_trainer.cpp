#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "ltos/trainer.hpp"

using namespace ltos;

namespace {

RunConfig quick_prisoner() {
  RunConfig c = prisoner_defaults();
  c.episodes = 40;
  c.eval_interval = 10;
  c.high_sample_size = 50;
  c.hidden_units = 8;
  c.high_hidden_units = 8;
  return c;
}

RunConfig quick_foraging() {
  RunConfig c = foraging_defaults();
  c.env.foraging.horizon = 12;
  c.episodes = 6;
  c.eval_interval = 3;
  c.eval_episodes = 1;
  c.high_sample_size = 20;
  c.high_update_every = 2;
  c.hidden_units = 8;
  c.high_hidden_units = 8;
  return c;
}

std::string metrics_csv(const MetricsTable& t) {
  std::ostringstream out;
  write_metrics_csv(out, t);
  write_eval_csv(out, t);
  return out.str();
}

std::vector<double> all_params(const Trainer& t) {
  std::vector<double> out;
  for (const auto& m : t.agents()) {
    for (const Mlp* net : {&m.q.self_encoder(), &m.q.neighbor_encoder(), &m.q.head(),
                           &m.phi.network()}) {
      out.insert(out.end(), net->params().begin(), net->params().end());
    }
  }
  return out;
}

std::vector<double> phi_params(const Trainer& t) {
  std::vector<double> out;
  for (const auto& m : t.agents()) {
    out.insert(out.end(), m.phi.network().params().begin(), m.phi.network().params().end());
  }
  return out;
}

std::vector<double> q_params(const Trainer& t) {
  std::vector<double> out;
  for (const auto& m : t.agents()) {
    for (const Mlp* net : {&m.q.self_encoder(), &m.q.neighbor_encoder(), &m.q.head()}) {
      out.insert(out.end(), net->params().begin(), net->params().end());
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("trainer") {
  TEST_CASE("method names") {
    CHECK(method_from_string("fixed_ltos") == Method::kFixed);
    CHECK(method_from_string("independent_q") == Method::kIndependent);
    CHECK(to_string(Method::kLtos) == "ltos");
    CHECK_THROWS_AS(method_from_string("qmix"), std::invalid_argument);
  }

  TEST_CASE("first prisoner step with s0 = 0.5 and no noise splits rewards evenly") {
    RunConfig c = quick_prisoner();
    c.noise.kind = NoiseKind::kNone;
    Trainer t(c, Method::kLtos, 3);
    StepTrace seen;
    std::vector<double> shaped, raw;
    t.set_hooks({[&](const StepTrace& s) {
                   if (s.step != 0) return;
                   seen = s;
                   shaped.assign(s.shaped_rewards.begin(), s.shaped_rewards.end());
                   raw.assign(s.raw_rewards.begin(), s.raw_rewards.end());
                 },
                 {}});
    t.rollout_step();
    const auto& w_in = t.buffer().record(0).w_in;
    CHECK(w_in[0].values[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(w_in[0].values[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(w_in[1].values[0] == doctest::Approx(0.5).epsilon(1e-12));
    const double mean = 0.5 * (raw[0] + raw[1]);
    CHECK(shaped[0] == doctest::Approx(mean));
    CHECK(shaped[1] == doctest::Approx(mean));
  }

  TEST_CASE("the action interval holds the emitted weights") {
    // The grid graph moves with the agents, so a hold only lasts while the
    // episode and the graph stay the same; each such run restarts the interval.
    RunConfig c = quick_foraging();
    c.action_interval = 5;
    Trainer t(c, Method::kLtos, 5);
    struct Seen {
      std::uint64_t episode;
      SharingGraph graph;
      WeightAssignment w;
    };
    std::vector<Seen> seen;
    std::uint64_t episode = 0;
    t.set_hooks({[&](const StepTrace& s) { seen.push_back({episode, *s.graph, *s.weights}); }, {}});
    for (int k = 0; k < 400; ++k) {
      if (t.rollout_step()) ++episode;
    }
    int offset = 0;
    int held = 0;
    int reemitted = 0;
    for (std::size_t k = 1; k < seen.size(); ++k) {
      const bool same_run = seen[k].episode == seen[k - 1].episode && seen[k].graph == seen[k - 1].graph;
      offset = same_run ? offset + 1 : 0;
      if (!same_run) continue;
      if (offset % 5 != 0) {
        CHECK(seen[k].w.out == seen[k - 1].w.out);
        ++held;
      } else if (!(seen[k].w.out == seen[k - 1].w.out)) {
        ++reemitted;
      }
    }
    CHECK(held > 20);
    CHECK(reemitted > 0);
  }

  TEST_CASE("terminal transitions are stored with the done flag") {
    Trainer t(quick_prisoner(), Method::kIndependent, 2);
    int steps = 1;
    while (!t.rollout_step()) ++steps;
    CHECK(t.buffer().size() == static_cast<std::size_t>(steps));
    CHECK(t.buffer().record(steps - 1).done);
    if (steps > 1) CHECK_FALSE(t.buffer().record(0).done);
  }

  TEST_CASE("same seed: same draws, same parameters") {
    for (Method m : {Method::kLtos, Method::kFixed, Method::kIndependent}) {
      Trainer a(quick_prisoner(), m, 9), b(quick_prisoner(), m, 9);
      std::vector<std::uint64_t> da, db;
      a.set_hooks({{}, [&](AgentId, std::span<const std::uint64_t> s) { da.insert(da.end(), s.begin(), s.end()); }});
      b.set_hooks({{}, [&](AgentId, std::span<const std::uint64_t> s) { db.insert(db.end(), s.begin(), s.end()); }});
      for (int k = 0; k < 300; ++k) {
        a.rollout_step();
        a.update_step();
        b.rollout_step();
        b.update_step();
      }
      CHECK(!da.empty());
      CHECK(da == db);
      CHECK(all_params(a) == all_params(b));
    }
  }

  TEST_CASE("every agent trains on the same timesteps in each draw") {
    Trainer t(quick_foraging(), Method::kLtos, 4);
    std::vector<std::vector<std::uint64_t>> per_agent(8);
    int draws = 0;
    t.set_hooks({{}, [&](AgentId i, std::span<const std::uint64_t> s) {
                   std::vector<std::uint64_t> sorted(s.begin(), s.end());
                   std::sort(sorted.begin(), sorted.end());
                   per_agent[i] = sorted;
                   if (i == 7) {
                     ++draws;
                     for (int j = 1; j < 8; ++j) REQUIRE(per_agent[j] == per_agent[0]);
                   }
                 }});
    t.train();
    CHECK(draws > 20);
  }

  TEST_CASE("disabled high updates freeze the selfishness trace") {
    RunConfig c = quick_prisoner();
    c.high_update_every = 0;
    c.noise.kind = NoiseKind::kNone;
    Trainer t(c, Method::kLtos, 6);
    const auto phi0 = phi_params(t);
    const auto table = t.train();
    CHECK(phi_params(t) == phi0);
    for (const auto& e : table.episodes) {
      for (double s : e.selfishness) CHECK(s == table.episodes.front().selfishness.front());
    }
  }

  TEST_CASE("each objective moves only its own parameters") {
    RunConfig c = quick_prisoner();
    c.high_sample_size = 30;
    Trainer t(c, Method::kLtos, 8);
    bool saw_low_only = false, saw_high = false;
    for (int k = 0; k < 80; ++k) {
      t.rollout_step();
      const auto q0 = q_params(t);
      const auto p0 = phi_params(t);
      const auto r = t.update_step();
      if (!r.low) {
        CHECK(q_params(t) == q0);
        CHECK(phi_params(t) == p0);
        continue;
      }
      CHECK_FALSE(q_params(t) == q0);
      if (r.high) {
        saw_high = true;
      } else {
        saw_low_only = true;
        CHECK(phi_params(t) == p0);
      }
    }
    CHECK(saw_low_only);
    CHECK(saw_high);
  }

  TEST_CASE("episode cadence runs the ascent through whole episodes") {
    RunConfig c = quick_foraging();
    c.high_update_every = 3;
    c.episodes = 8;
    Trainer t(c, Method::kLtos, 1);
    // A change in phi seen at step s was made by the update after step s-1.
    std::vector<std::uint64_t> episode_of_step;
    std::map<std::uint64_t, std::pair<int, int>> per_episode;  // updates, ascents
    auto last = phi_params(t);
    t.set_hooks({[&](const StepTrace& s) {
                   episode_of_step.push_back(s.episode);
                   if (s.step == 0) return;
                   const auto now = phi_params(t);
                   auto& counts = per_episode[episode_of_step[s.step - 1]];
                   if (t.buffer().size() >= c.high_sample_size) ++counts.first;
                   if (now != last) ++counts.second;
                   last = now;
                 },
                 {}});
    t.train();
    for (auto [ep, counts] : per_episode) {
      INFO("episode " << ep);
      if (ep % 3 != 0) CHECK(counts.second == 0);
    }
    CHECK(per_episode[3].second == per_episode[3].first);
    CHECK(per_episode[6].second == per_episode[6].first);
    CHECK(per_episode[6].second == 12);
  }

  TEST_CASE("prisoner tables train without divergence") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      RunConfig c = prisoner_defaults();
      c.max_steps = 1500;
      c.high_sample_size = 200;
      Trainer t(c, Method::kLtos, seed);
      const auto table = t.train();
      CHECK(t.steps() == 1500);
      for (const auto& e : table.episodes) {
        for (double l : e.q_loss) CHECK((std::isnan(l) || (std::isfinite(l) && l < 100.0)));
        for (double s : e.selfishness) CHECK((s > 0.0 && s < 1.0));
      }
    }
  }

  TEST_CASE("zero episodes give an empty table") {
    RunConfig c = quick_prisoner();
    c.episodes = 0;
    const auto table = Trainer(c, Method::kLtos, 1).train();
    CHECK(table.episodes.empty());
    std::ostringstream out;
    write_metrics_csv(out, table);
    CHECK(out.str() == "episode,step,agent,return,reward,selfishness,q_loss\n");
  }

  TEST_CASE("the step budget stops the run mid-episode") {
    RunConfig c = quick_prisoner();
    c.max_steps = 7;
    c.episodes = 1000;
    Trainer t(c, Method::kIndependent, 1);
    const auto table = t.train();
    CHECK(t.steps() == 7);
    std::uint64_t recorded = 0;
    for (const auto& e : table.episodes) recorded += e.length;
    CHECK(recorded <= 7);
    CHECK_FALSE(table.evals.empty());
  }

  TEST_CASE("identical runs give identical bytes, serial or parallel") {
    for (Method m : {Method::kLtos, Method::kFixed}) {
      const auto a = metrics_csv(Trainer(quick_foraging(), m, 12).train());
      const auto b = metrics_csv(Trainer(quick_foraging(), m, 12).train());
      RunConfig par = quick_foraging();
      par.execution = Execution::kParallel;
      const auto p = metrics_csv(Trainer(par, m, 12).train());
      CHECK(a == b);
      CHECK(a == p);
      CHECK(a != metrics_csv(Trainer(quick_foraging(), m, 13).train()));
    }
  }

  TEST_CASE("shaped rewards conserve the team total at every step") {
    Trainer t(quick_foraging(), Method::kLtos, 2);
    double worst = 0.0;
    t.set_hooks({[&](const StepTrace& s) {
                   double raw = 0.0, shaped = 0.0;
                   for (double r : s.raw_rewards) raw += r;
                   for (double r : s.shaped_rewards) shaped += r;
                   worst = std::max(worst, std::abs(raw - shaped) / std::max(1.0, std::abs(raw)));
                 },
                 {}});
    const auto table = t.train();
    CHECK(worst <= 1e-9);
    CHECK(table.max_conservation_error <= 1e-9);
  }

  TEST_CASE("evaluation is greedy, noise-free and repeatable") {
    Trainer t(quick_prisoner(), Method::kLtos, 3);
    for (int k = 0; k < 100; ++k) {
      t.rollout_step();
      t.update_step();
    }
    std::vector<TraceRow> trace;
    const auto a = t.evaluate(&trace);
    const auto b = t.evaluate();
    CHECK(a.average_return == b.average_return);
    CHECK(a.step == 100);
    REQUIRE_FALSE(trace.empty());
    CHECK(trace.front().t == 0);
    CHECK(trace.size() % 2 == 0);
    std::ostringstream out;
    write_trace_csv(out, trace);
    CHECK(out.str().rfind("t,agent,obs0,obs1,action,reward\n0,0,-0.25,0.25,", 0) == 0);
  }

  TEST_CASE("checkpoints restore every network") {
    const auto dir = std::filesystem::temp_directory_path() / "ltos_checkpoint_test";
    std::filesystem::remove_all(dir);
    Trainer a(quick_prisoner(), Method::kLtos, 4);
    for (int k = 0; k < 60; ++k) {
      a.rollout_step();
      a.update_step();
    }
    a.save_checkpoint(dir.string());
    CHECK(std::filesystem::exists(dir / "1" / "phi_target.bin"));
    Trainer b(quick_prisoner(), Method::kLtos, 5);
    b.load_checkpoint(dir.string());
    CHECK(all_params(a) == all_params(b));
    CHECK(b.agents()[0].q_target == a.agents()[0].q_target);
    Trainer other(quick_foraging(), Method::kLtos, 4);
    CHECK_THROWS(other.load_checkpoint(dir.string()));
    std::filesystem::remove_all(dir);
  }
}
