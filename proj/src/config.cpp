#include "ltos/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ltos/foraging.hpp"
#include "ltos/prisoner.hpp"

namespace ltos {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw std::invalid_argument("config: " + key + "=" + v + " is not a finite number");
  }
  return out;
}

std::int64_t to_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw std::invalid_argument("config: " + key + "=" + v + " is not an integer");
  }
  return out;
}

std::uint64_t to_count(const std::string& key, const std::string& v) {
  const auto n = to_int(key, v);
  if (n < 0) throw std::invalid_argument("config: " + key + " must be non-negative");
  return static_cast<std::uint64_t>(n);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: " + key + "=" + v + " is not a boolean");
}

CadenceUnit to_unit(const std::string& key, const std::string& v) {
  if (v == "step") return CadenceUnit::kStep;
  if (v == "episode") return CadenceUnit::kEpisode;
  throw std::invalid_argument("config: " + key + " must be 'step' or 'episode'");
}

std::array<std::array<double, 2>, 2> to_payoffs(const std::string& key, const std::string& v) {
  std::array<std::array<double, 2>, 2> out{};
  std::stringstream ss(v);
  std::string item;
  int k = 0;
  while (std::getline(ss, item, ',')) {
    if (k >= 4) break;
    out[k / 2][k % 2] = to_double(key, trim(item));
    ++k;
  }
  if (k != 4 || std::getline(ss, item, ',')) {
    throw std::invalid_argument("config: " + key + " needs four comma-separated payoffs");
  }
  return out;
}

std::string from_payoffs(const std::array<std::array<double, 2>, 2>& p) {
  return fmt(p[0][0]) + "," + fmt(p[0][1]) + "," + fmt(p[1][0]) + "," + fmt(p[1][1]);
}

struct Field {
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define REAL_FIELD(name, member) \
  Field{name, [](RunConfig& c, const std::string& v) { c.member = to_double(name, v); }, \
        [](const RunConfig& c) { return fmt(c.member); }}
#define COUNT_FIELD(name, member, type) \
  Field{name, [](RunConfig& c, const std::string& v) { c.member = static_cast<type>(to_count(name, v)); }, \
        [](const RunConfig& c) { return std::to_string(c.member); }}
#define INT_FIELD(name, member) \
  Field{name, [](RunConfig& c, const std::string& v) { c.member = static_cast<int>(to_int(name, v)); }, \
        [](const RunConfig& c) { return std::to_string(c.member); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"env", [](RunConfig& c, const std::string& v) { c.env.kind = env_kind_from_string(v); },
            [](const RunConfig& c) { return to_string(c.env.kind); }},
      INT_FIELD("corridor_end", env.prisoner.corridor_end),
      REAL_FIELD("step_cost", env.prisoner.step_cost),
      INT_FIELD("prisoner_horizon", env.prisoner.horizon),
      INT_FIELD("grid", env.foraging.grid),
      INT_FIELD("n_agents", env.foraging.n_agents),
      INT_FIELD("n_foods", env.foraging.n_foods),
      INT_FIELD("k_neighbors", env.foraging.k_neighbors),
      INT_FIELD("food_slots", env.foraging.food_slots),
      INT_FIELD("foraging_horizon", env.foraging.horizon),
      Field{"food_consumed",
            [](RunConfig& c, const std::string& v) { c.env.foraging.food_consumed = to_bool("food_consumed", v); },
            [](const RunConfig& c) { return std::string(c.env.foraging.food_consumed ? "true" : "false"); }},
      Field{"matrix_row",
            [](RunConfig& c, const std::string& v) { c.env.matrix.row = to_payoffs("matrix_row", v); },
            [](const RunConfig& c) { return from_payoffs(c.env.matrix.row); }},
      Field{"matrix_col",
            [](RunConfig& c, const std::string& v) { c.env.matrix.col = to_payoffs("matrix_col", v); },
            [](const RunConfig& c) { return from_payoffs(c.env.matrix.col); }},
      REAL_FIELD("gamma", gamma),
      REAL_FIELD("tau", tau),
      Field{"low_optimizer",
            [](RunConfig& c, const std::string& v) { c.low_optimizer = optimizer_from_string(v); },
            [](const RunConfig& c) { return to_string(c.low_optimizer); }},
      REAL_FIELD("low_lr", low_lr),
      Field{"high_optimizer",
            [](RunConfig& c, const std::string& v) { c.high_optimizer = optimizer_from_string(v); },
            [](const RunConfig& c) { return to_string(c.high_optimizer); }},
      REAL_FIELD("high_lr", high_lr),
      REAL_FIELD("epsilon_start", epsilon.start),
      REAL_FIELD("epsilon_decay", epsilon.decay),
      REAL_FIELD("epsilon_end", epsilon.end),
      Field{"epsilon_unit",
            [](RunConfig& c, const std::string& v) { c.epsilon_unit = to_unit("epsilon_unit", v); },
            [](const RunConfig& c) { return to_string(c.epsilon_unit); }},
      Field{"noise", [](RunConfig& c, const std::string& v) { c.noise.kind = noise_from_string(v); },
            [](const RunConfig& c) { return to_string(c.noise.kind); }},
      REAL_FIELD("noise_epsilon", noise.epsilon),
      REAL_FIELD("noise_sigma", noise.sigma),
      REAL_FIELD("noise_theta", noise.theta),
      Field{"noise_scales_with_epsilon",
            [](RunConfig& c, const std::string& v) {
              c.noise_scales_with_epsilon = to_bool("noise_scales_with_epsilon", v);
            },
            [](const RunConfig& c) { return std::string(c.noise_scales_with_epsilon ? "true" : "false"); }},
      COUNT_FIELD("batch_size", batch_size, std::size_t),
      COUNT_FIELD("sample_size", sample_size, std::size_t),
      COUNT_FIELD("high_batch_size", high_batch_size, std::size_t),
      COUNT_FIELD("high_sample_size", high_sample_size, std::size_t),
      COUNT_FIELD("buffer_capacity", buffer_capacity, std::size_t),
      INT_FIELD("update_every", update_every),
      INT_FIELD("high_update_every", high_update_every),
      Field{"high_update_unit",
            [](RunConfig& c, const std::string& v) { c.high_update_unit = to_unit("high_update_unit", v); },
            [](const RunConfig& c) { return to_string(c.high_update_unit); }},
      INT_FIELD("action_interval", action_interval),
      REAL_FIELD("selfishness", selfishness),
      COUNT_FIELD("hidden_units", hidden_units, std::size_t),
      COUNT_FIELD("high_hidden_units", high_hidden_units, std::size_t),
      Field{"init",
            [](RunConfig& c, const std::string& v) {
              if (v == "uniform") {
                c.init = Init::kUniform;
              } else if (v == "normal") {
                c.init = Init::kNormal;
              } else {
                throw std::invalid_argument("config: init must be 'uniform' or 'normal'");
              }
            },
            [](const RunConfig& c) { return std::string(c.init == Init::kUniform ? "uniform" : "normal"); }},
      REAL_FIELD("init_stddev", init_stddev),
      COUNT_FIELD("episodes", episodes, std::uint64_t),
      COUNT_FIELD("max_steps", max_steps, std::uint64_t),
      COUNT_FIELD("eval_interval", eval_interval, std::uint64_t),
      COUNT_FIELD("eval_episodes", eval_episodes, std::uint64_t),
      Field{"execution",
            [](RunConfig& c, const std::string& v) {
              if (v == "serial") {
                c.execution = Execution::kSerial;
              } else if (v == "parallel") {
                c.execution = Execution::kParallel;
              } else {
                throw std::invalid_argument("config: execution must be 'serial' or 'parallel'");
              }
            },
            [](const RunConfig& c) {
              return std::string(c.execution == Execution::kSerial ? "serial" : "parallel");
            }},
  };
  return table;
}

#undef REAL_FIELD
#undef COUNT_FIELD
#undef INT_FIELD

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("config: " + what);
}

}  // namespace

std::string to_string(CadenceUnit unit) { return unit == CadenceUnit::kStep ? "step" : "episode"; }

RunConfig prisoner_defaults() { return RunConfig{}; }

RunConfig foraging_defaults() {
  RunConfig c;
  c.env.kind = EnvKind::kForaging;
  c.gamma = 0.96;
  c.tau = 0.01;
  c.low_optimizer = OptimizerKind::kAdam;
  c.low_lr = 1e-4;
  c.high_optimizer = OptimizerKind::kSgd;
  c.high_lr = 1e-4;
  c.epsilon = {0.6, 0.996, 0.01};
  c.epsilon_unit = CadenceUnit::kEpisode;
  c.noise = {NoiseKind::kOrnsteinUhlenbeck, 1.0, 0.025, 0.15};
  c.noise_scales_with_epsilon = true;
  c.batch_size = 10;
  c.sample_size = 10;
  c.high_batch_size = 32;
  c.high_sample_size = 5000;
  c.buffer_capacity = 200000;
  c.high_update_every = 100;
  c.high_update_unit = CadenceUnit::kEpisode;
  c.action_interval = 1;
  c.selfishness = 0.5;
  c.episodes = 1000;
  c.max_steps = 0;
  c.eval_interval = 10;
  c.eval_episodes = 2;
  return c;
}

void validate(const RunConfig& c) {
  require(c.gamma >= 0.0 && c.gamma <= 1.0, "gamma must be in [0,1]");
  require(c.tau >= 0.0 && c.tau <= 1.0, "tau must be in [0,1]");
  require(c.low_lr > 0.0, "low_lr must be positive");
  require(c.high_lr > 0.0, "high_lr must be positive");
  require(c.epsilon.start >= 0.0 && c.epsilon.start <= 1.0, "epsilon_start must be in [0,1]");
  require(c.epsilon.end >= 0.0 && c.epsilon.end <= 1.0, "epsilon_end must be in [0,1]");
  require(c.epsilon.decay > 0.0 && c.epsilon.decay <= 1.0, "epsilon_decay must be in (0,1]");
  require(c.noise.epsilon >= 0.0 && c.noise.epsilon <= 1.0, "noise_epsilon must be in [0,1]");
  require(c.noise.sigma >= 0.0, "noise_sigma must be non-negative");
  require(c.noise.theta >= 0.0 && c.noise.theta <= 1.0, "noise_theta must be in [0,1]");
  require(c.batch_size >= 1 && c.high_batch_size >= 1, "batch sizes must be positive");
  require(c.sample_size >= 1 && c.high_sample_size >= 1, "sample sizes must be positive");
  require(c.buffer_capacity >= 1, "buffer_capacity must be positive");
  require(c.update_every >= 1, "update_every must be >= 1");
  require(c.high_update_every >= 0, "high_update_every must be >= 0");
  require(c.action_interval >= 1, "action_interval must be >= 1");
  require(c.selfishness > 0.0 && c.selfishness < 1.0, "selfishness must be in (0,1)");
  require(c.hidden_units >= 1 && c.high_hidden_units >= 1, "hidden units must be positive");
  require(c.init_stddev > 0.0, "init_stddev must be positive");
  require(c.eval_interval >= 1, "eval_interval must be positive");
  switch (c.env.kind) {
    case EnvKind::kPrisoner:
      validate(c.env.prisoner);
      break;
    case EnvKind::kForaging:
      validate(c.env.foraging);
      break;
    case EnvKind::kMatrix:
      break;
  }
}

RunConfig parse_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not key=value: '" + line + "'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " has an empty key or value");
    }
    entries.emplace_back(std::move(key), std::move(value));
  }

  RunConfig config = prisoner_defaults();
  for (const auto& [key, value] : entries) {
    if (key == "env" && env_kind_from_string(value) == EnvKind::kForaging) {
      config = foraging_defaults();
    }
  }

  std::map<std::string, const Field*> by_key;
  for (const Field& f : fields()) by_key[f.key] = &f;
  std::map<std::string, int> seen;
  for (const auto& [key, value] : entries) {
    std::string target = key;
    if (key == "horizon") {
      target = config.env.kind == EnvKind::kForaging ? "foraging_horizon" : "prisoner_horizon";
    }
    auto it = by_key.find(target);
    if (it == by_key.end()) throw std::invalid_argument("config: unknown key '" + key + "'");
    if (++seen[target] > 1) throw std::invalid_argument("config: key '" + key + "' repeated");
    it->second->set(config, value);
  }
  validate(config);
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot read '" + path + "'");
  return parse_config(in);
}

RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

void write_config(std::ostream& out, const RunConfig& config) {
  for (const Field& f : fields()) out << f.key << '=' << f.get(config) << '\n';
}

std::string write_config_string(const RunConfig& config) {
  std::ostringstream out;
  write_config(out, config);
  return out.str();
}

}  // namespace ltos
