#include "ltos/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>

#include "ltos/config.hpp"
#include "ltos/metrics.hpp"
#include "ltos/oracle.hpp"
#include "ltos/trainer.hpp"

namespace ltos {
namespace {

namespace fs = std::filesystem;

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument(what + " '" + text + "' is not a non-negative integer");
  }
  return v;
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

struct SeedRun {
  std::uint64_t seed = 0;
  MetricsTable table;
  bool ok = false;
  std::string error;
};

int run_train(const RunManifest& m, const RunConfig& config, Method method, std::ostream& log) {
  const fs::path root(m.out_dir);
  fs::create_directories(root);
  {
    auto cfg = open_csv(root / "config.cfg");
    write_config(cfg, config);
  }

  std::vector<SeedRun> runs(m.seeds.size());
  std::mutex log_mutex;
  for_each_index(static_cast<int>(m.seeds.size()), config.execution, [&](int k) {
    SeedRun& r = runs[k];
    r.seed = m.seeds[k];
    const fs::path dir = root / std::to_string(r.seed);
    fs::create_directories(dir);
    try {
      Trainer trainer(config, method, r.seed);
      try {
        trainer.train(r.table);
        r.ok = true;
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      trainer.save_checkpoint(dir.string());
      if (r.ok) {
        std::vector<TraceRow> trace;
        trainer.evaluate(&trace);
        auto out = open_csv(dir / "trace.csv");
        write_trace_csv(out, trace);
      }
    } catch (const std::exception& e) {
      if (r.error.empty()) r.error = e.what();
      r.ok = false;
    }
    auto metrics = open_csv(dir / "metrics.csv");
    write_metrics_csv(metrics, r.table);
    auto eval = open_csv(dir / "eval.csv");
    write_eval_csv(eval, r.table);
    std::lock_guard<std::mutex> lock(log_mutex);
    if (r.ok) {
      log << "seed " << r.seed << ": " << r.table.episodes.size() << " episodes, "
          << r.table.steps << " steps\n";
    } else {
      log << "seed " << r.seed << " failed: " << r.error << '\n';
    }
  });

  std::vector<MetricsTable> tables;
  for (const auto& r : runs) tables.push_back(r.table);
  {
    auto out = open_csv(root / "aggregate.csv");
    write_aggregate_csv(out, tables);
    auto eval = open_csv(root / "eval_aggregate.csv");
    write_eval_aggregate_csv(eval, tables);
  }

  auto summary = open_csv(root / "summary.csv");
  summary << "seed,final_return,final_reward,episodes,steps,episodes_to_0.9\n";
  double sum = 0.0;
  int counted = 0;
  bool all_ok = true;
  for (const auto& r : runs) {
    all_ok = all_ok && r.ok;
    if (r.table.evals.empty()) continue;
    const double ret = final_window_return(r.table);
    const auto hit = episodes_to_threshold(r.table, 0.9);
    summary << r.seed << ',' << format_real(ret) << ','
            << format_real(final_window_reward(r.table)) << ',' << r.table.episodes.size()
            << ',' << r.table.steps << ',' << (hit ? std::to_string(*hit) : std::string("none"))
            << '\n';
    sum += ret;
    ++counted;
  }
  if (counted > 0) {
    log << "final-window mean return: " << format_real(sum / counted) << " over " << counted
        << " seed(s)\n";
  }
  return all_ok ? 0 : 1;
}

int run_oracle(const RunManifest& m, const RunConfig& config, std::ostream& log) {
  const fs::path root(m.out_dir);
  fs::create_directories(root);
  switch (config.env.kind) {
    case EnvKind::kPrisoner: {
      const JointMDP mdp = build_prisoner_mdp(config.env.prisoner);
      const auto vi = value_iterate(mdp, config.gamma, 1e-10);
      auto out = open_csv(root / "oracle.csv");
      write_oracle_csv(out, vi, mdp.n_states());
      log << "optimal average return " << format_real(vi.optimal_return) << " (" << mdp.n_states()
          << " states, " << vi.iterations << " sweeps)\n";
      return 0;
    }
    case EnvKind::kForaging: {
      auto out = open_csv(root / "upper_bound.csv");
      out << "seed,upper_bound\n";
      for (auto seed : m.seeds) {
        const double b = foraging_seed_upper_bound(config.env.foraging, seed);
        out << seed << ',' << format_real(b) << '\n';
        log << "seed " << seed << ": per-step reward upper bound " << format_real(b) << '\n';
      }
      return 0;
    }
    case EnvKind::kMatrix:
      break;
  }
  throw UsageError("oracle: no oracle for the matrix environment; use the matrix command");
}

int run_matrix(const RunManifest& m, const RunConfig& config, std::ostream& log) {
  MatrixGame game;
  if (config.env.kind == EnvKind::kMatrix) {
    game = config.env.matrix;
  } else if (config.env.kind == EnvKind::kPrisoner) {
    game = prisoner_payoff_matrix(config.env.prisoner);
  } else {
    throw UsageError("matrix: needs env=matrix or env=prisoner");
  }
  const MatrixAnalysis a = analyze_matrix_game(game);
  const fs::path root(m.out_dir);
  fs::create_directories(root);
  auto out = open_csv(root / "matrix.csv");
  out << "row_action,col_action,row_payoff,col_payoff,nash,welfare_optimal\n";
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const Profile p{r, c};
      const bool nash = std::find(a.nash.begin(), a.nash.end(), p) != a.nash.end();
      const bool best = std::find(a.welfare_optimal.begin(), a.welfare_optimal.end(), p) !=
                        a.welfare_optimal.end();
      out << r << ',' << c << ',' << format_real(game.row[r][c]) << ','
          << format_real(game.col[r][c]) << ',' << nash << ',' << best << '\n';
    }
  }
  log << a.nash.size() << " pure Nash profile(s), dilemma=" << (a.dilemma ? "true" : "false")
      << '\n';
  return 0;
}

}  // namespace

Command command_from_string(const std::string& name) {
  if (name == "train") return Command::kTrain;
  if (name == "oracle") return Command::kOracle;
  if (name == "matrix") return Command::kMatrix;
  throw UsageError("unknown command '" + name + "'");
}

std::vector<std::uint64_t> parse_seeds(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) seeds.push_back(parse_u64(item, "seed"));
  if (seeds.empty() || (!csv.empty() && csv.back() == ',')) {
    throw std::invalid_argument("seed list '" + csv + "' is empty or malformed");
  }
  return seeds;
}

std::uint64_t seed_offset_from_env() {
  const char* raw = std::getenv("LTOS_SEED_OFFSET");
  if (raw == nullptr || *raw == '\0') return 0;
  return parse_u64(raw, "LTOS_SEED_OFFSET");
}

int run(const RunManifest& manifest, std::ostream& log) {
  if (manifest.seeds.empty()) throw UsageError("at least one seed is required");
  if (manifest.out_dir.empty()) throw UsageError("an output directory is required");
  RunConfig config;
  try {
    config = parse_config_file(manifest.config_path);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  if (manifest.episodes) config.episodes = *manifest.episodes;

  RunManifest m = manifest;
  const std::uint64_t offset = seed_offset_from_env();
  for (auto& s : m.seeds) s += offset;

  Command command = m.command;
  if (m.method == "oracle") command = Command::kOracle;
  if (m.method == "matrix") command = Command::kMatrix;
  switch (command) {
    case Command::kOracle:
      return run_oracle(m, config, log);
    case Command::kMatrix:
      return run_matrix(m, config, log);
    case Command::kTrain:
      break;
  }
  Method method;
  try {
    method = method_from_string(m.method);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  return run_train(m, config, method, log);
}

}  // namespace ltos
