#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ltos/harness.hpp"

using namespace ltos;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / name) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  }
};

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RunManifest manifest(const std::string& config, const std::string& out,
                     std::vector<std::uint64_t> seeds, std::string method = "ltos") {
  RunManifest m;
  m.config_path = config;
  m.out_dir = out;
  m.seeds = std::move(seeds);
  m.method = std::move(method);
  return m;
}

const char* kTinyPrisoner =
    "env=prisoner\nepisodes=12\neval_interval=4\nhigh_sample_size=20\nhidden_units=8\n"
    "high_hidden_units=8\n";

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("seed lists") {
    CHECK(parse_seeds("1,2,3") == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(parse_seeds("42") == std::vector<std::uint64_t>{42});
    CHECK_THROWS_AS(parse_seeds(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_seeds("1,,2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_seeds("1,2,"), std::invalid_argument);
    CHECK_THROWS_AS(parse_seeds("-1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_seeds("one"), std::invalid_argument);
  }

  TEST_CASE("commands") {
    CHECK(command_from_string("oracle") == Command::kOracle);
    CHECK_THROWS_AS(command_from_string("eval"), UsageError);
  }

  TEST_CASE("train writes per-seed metrics, aggregates and a summary") {
    Scratch s("ltos_harness_train");
    const auto cfg = s.write("p.cfg", kTinyPrisoner);
    const auto out = (s.dir / "run").string();
    std::ostringstream log;
    REQUIRE(run(manifest(cfg, out, {1, 2, 3}), log) == 0);
    CHECK(log.str().find("final-window mean return: ") != std::string::npos);
    CHECK(fs::exists(fs::path(out) / "config.cfg"));

    std::map<std::string, std::vector<double>> per_episode;
    for (const char* seed : {"1", "2", "3"}) {
      const auto dir = fs::path(out) / seed;
      CHECK(fs::exists(dir / "eval.csv"));
      CHECK(fs::exists(dir / "trace.csv"));
      CHECK(fs::exists(dir / "0" / "q.bin"));
      const auto rows = read_csv(dir / "metrics.csv");
      REQUIRE(rows.size() == 1 + 12 * 2);
      CHECK(rows[0] == std::vector<std::string>{"episode", "step", "agent", "return", "reward",
                                                "selfishness", "q_loss"});
      for (std::size_t r = 1; r < rows.size(); r += 2) {
        per_episode[rows[r][0]].push_back(0.5 * (std::stod(rows[r][3]) + std::stod(rows[r + 1][3])));
      }
    }
    const auto agg = read_csv(fs::path(out) / "aggregate.csv");
    REQUIRE(agg.size() == 13);
    for (std::size_t r = 1; r < agg.size(); ++r) {
      const auto& v = per_episode.at(agg[r][0]);
      CHECK(std::stod(agg[r][1]) == doctest::Approx((v[0] + v[1] + v[2]) / 3).epsilon(1e-12));
      CHECK(std::stod(agg[r][2]) == std::min({v[0], v[1], v[2]}));
      CHECK(std::stod(agg[r][3]) == std::max({v[0], v[1], v[2]}));
    }
    const auto summary = read_csv(fs::path(out) / "summary.csv");
    CHECK(summary.size() == 4);
    CHECK(summary[0][0] == "seed");
  }

  TEST_CASE("episodes override and repeated runs reproduce byte for byte") {
    Scratch s("ltos_harness_repeat");
    const auto cfg = s.write("p.cfg", kTinyPrisoner);
    std::ostringstream log;
    auto m = manifest(cfg, (s.dir / "a").string(), {5}, "fixed");
    m.episodes = 5;
    REQUIRE(run(m, log) == 0);
    m.out_dir = (s.dir / "b").string();
    REQUIRE(run(m, log) == 0);
    const auto a = slurp(s.dir / "a" / "5" / "metrics.csv");
    CHECK(a == slurp(s.dir / "b" / "5" / "metrics.csv"));
    CHECK(read_csv(s.dir / "a" / "5" / "metrics.csv").size() == 1 + 5 * 2);
  }

  TEST_CASE("the seed offset shifts every seed") {
    Scratch s("ltos_harness_offset");
    const auto cfg = s.write("p.cfg", kTinyPrisoner);
    std::ostringstream log;
    setenv("LTOS_SEED_OFFSET", "100", 1);
    CHECK(seed_offset_from_env() == 100);
    auto m = manifest(cfg, s.dir.string(), {1}, "independent");
    m.episodes = 2;
    const int status = run(m, log);
    setenv("LTOS_SEED_OFFSET", "x", 1);
    CHECK_THROWS(seed_offset_from_env());
    unsetenv("LTOS_SEED_OFFSET");
    CHECK(seed_offset_from_env() == 0);
    CHECK(status == 0);
    CHECK(fs::exists(s.dir / "101" / "metrics.csv"));
    CHECK_FALSE(fs::exists(s.dir / "1"));
  }

  TEST_CASE("oracle on the corridor writes one summary line") {
    Scratch s("ltos_harness_oracle");
    const auto cfg = s.write("p.cfg", "env=prisoner\n");
    std::ostringstream log;
    REQUIRE(run(manifest(cfg, s.dir.string(), {1}, "oracle"), log) == 0);
    const auto rows = read_csv(s.dir / "oracle.csv");
    REQUIRE(rows.size() == 2);
    CHECK(std::stod(rows[1][0]) == doctest::Approx(0.97));
    CHECK(rows[1][1] == "6");
  }

  TEST_CASE("oracle on the grid writes per-seed upper bounds") {
    Scratch s("ltos_harness_bound");
    const auto cfg = s.write("f.cfg", "env=foraging\n");
    std::ostringstream log;
    auto m = manifest(cfg, s.dir.string(), {1, 2});
    m.command = Command::kOracle;
    REQUIRE(run(m, log) == 0);
    CHECK(read_csv(s.dir / "upper_bound.csv").size() == 3);
  }

  TEST_CASE("matrix analysis of the corridor") {
    Scratch s("ltos_harness_matrix");
    const auto cfg = s.write("p.cfg", "env=prisoner\n");
    std::ostringstream log;
    auto m = manifest(cfg, s.dir.string(), {1});
    m.command = Command::kMatrix;
    REQUIRE(run(m, log) == 0);
    CHECK(log.str().find("dilemma=true") != std::string::npos);
    const auto rows = read_csv(s.dir / "matrix.csv");
    REQUIRE(rows.size() == 5);
    CHECK(std::stod(rows[4][2]) == doctest::Approx(0.49));
    CHECK(rows[4][4] == "1");
    CHECK(rows[4][5] == "0");
    CHECK(rows[1][4] == "0");
    CHECK(rows[1][5] == "1");
  }

  TEST_CASE("usage errors") {
    Scratch s("ltos_harness_usage");
    const auto cfg = s.write("p.cfg", kTinyPrisoner);
    std::ostringstream log;
    CHECK_THROWS_AS(run(manifest(cfg, s.dir.string(), {1}, "qmix"), log), UsageError);
    CHECK_THROWS_AS(run(manifest((s.dir / "missing.cfg").string(), s.dir.string(), {1}), log),
                    UsageError);
    const auto bad = s.write("bad.cfg", "gamma=7\n");
    CHECK_THROWS_AS(run(manifest(bad, s.dir.string(), {1}), log), UsageError);
    CHECK_THROWS_AS(run(manifest(cfg, s.dir.string(), {}), log), UsageError);
    const auto matrix = s.write("m.cfg", "env=matrix\n");
    CHECK_THROWS_AS(run(manifest(matrix, s.dir.string(), {1}, "oracle"), log), UsageError);
  }
}
