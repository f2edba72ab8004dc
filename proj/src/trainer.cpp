#include "ltos/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <type_traits>

namespace ltos {
namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kSampleStream = 2;
constexpr std::uint64_t kExploreStream = 1000;
constexpr std::uint64_t kNoiseStream = 2000;
constexpr std::uint64_t kEvalSeedMix = 0x9e3779b97f4a7c15ULL;

std::span<const double> row_of(const std::vector<std::vector<double>>& obs, AgentId i) {
  return obs[static_cast<std::size_t>(i)];
}
std::span<const double> row_of(const ObservationTable& obs, AgentId i) { return obs.of(i); }

template <typename Agents, typename Obs>
WeightAssignment compute_weights(Method method, const RunConfig& config, Agents& agents,
                                 const Obs& obs, const SharingGraph& graph, bool explore,
                                 bool target, double sigma_scale) {
  switch (method) {
    case Method::kIndependent:
      return identity_weights(graph);
    case Method::kFixed:
      return selfish_weights(graph, config.selfishness);
    case Method::kLtos:
      break;
  }
  WeightAssignment w;
  w.out.resize(static_cast<std::size_t>(graph.n_agents()));
  for_each_index(graph.n_agents(), config.execution, [&](int i) {
    auto& m = agents[static_cast<std::size_t>(i)];
    const HighPolicy& policy = target ? m.phi_target : m.phi;
    if constexpr (!std::is_const_v<Agents>) {
      if (explore) {
        w.out[i] = emit_weights(policy, i, row_of(obs, i), graph.neighborhood(i), &m.noise,
                                &m.noise_rng, sigma_scale);
        return;
      }
    }
    w.out[i] = emit_weights(policy, i, row_of(obs, i), graph.neighborhood(i), nullptr, nullptr);
  });
  return w;
}

bool keyed_by(const WeightAssignment& w, const SharingGraph& graph) {
  if (static_cast<int>(w.out.size()) != graph.n_agents()) return false;
  for (AgentId i = 0; i < graph.n_agents(); ++i) {
    if (!w.out[i].has_keys(graph.neighborhood(i))) return false;
  }
  return true;
}

std::filesystem::path agent_dir(const std::string& dir, int agent) {
  return std::filesystem::path(dir) / std::to_string(agent);
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + p.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot read " + p.string());
  return in;
}

Mlp read_shaped(const std::filesystem::path& p, const Mlp& like) {
  auto in = open_in(p);
  Mlp m = read_mlp(in);
  if (m.param_count() != like.param_count() || m.input_size() != like.input_size() ||
      m.output_size() != like.output_size()) {
    throw std::runtime_error("checkpoint: " + p.string() + " has the wrong shape");
  }
  return m;
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::kLtos:
      return "ltos";
    case Method::kFixed:
      return "fixed";
    case Method::kIndependent:
      return "independent";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "ltos") return Method::kLtos;
  if (name == "fixed" || name == "fixed_ltos") return Method::kFixed;
  if (name == "independent" || name == "independent_q") return Method::kIndependent;
  throw std::invalid_argument("unknown method '" + name + "'");
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows) {
  const std::size_t width = rows.empty() ? 0 : rows.front().obs.size();
  out << "t,agent";
  for (std::size_t k = 0; k < width; ++k) out << ",obs" << k;
  out << ",action,reward\n";
  for (const auto& r : rows) {
    out << r.t << ',' << r.agent;
    for (double v : r.obs) out << ',' << format_real(v);
    out << ',' << r.action << ',' << format_real(r.reward) << '\n';
  }
}

Trainer::Trainer(RunConfig config, Method method, std::uint64_t seed)
    : config_(std::move(config)),
      method_(method),
      seed_(seed),
      env_(make_environment(config_.env, seed)),
      eval_env_(make_environment(config_.env, seed ^ kEvalSeedMix)),
      n_agents_(env_->n_agents()),
      buffer_(config_.buffer_capacity, n_agents_),
      sample_rng_(seed, kSampleStream) {
  validate(config_);
  const std::size_t obs_size = env_->observation_size();
  const int k_max = env_->k_max();
  const EnvStep probe = env_->reset();
  Rng init(seed, kInitStream);
  agents_.resize(static_cast<std::size_t>(n_agents_));
  for (AgentId i = 0; i < n_agents_; ++i) {
    AgentModels& m = agents_[i];
    m.q = QNetwork(obs_size, config_.hidden_units, env_->n_actions());
    m.q.initialize(init, config_.init, config_.init_stddev);
    m.q_target = m.q;
    m.q_opt = QOptimizer::make(config_.low_optimizer, config_.low_lr);
    m.phi = HighPolicy(obs_size, config_.high_hidden_units, k_max);
    m.phi.initialize(init, config_.init, config_.init_stddev);
    if (method_ == Method::kLtos && k_max >= 1) {
      // The grid graph changes every step, so its bias targets the configured k.
      const int degree = config_.env.kind == EnvKind::kForaging
                             ? config_.env.foraging.k_neighbors
                             : static_cast<int>(probe.graph->neighborhood(i).size()) - 1;
      init_selfishness(m.phi, config_.selfishness, std::clamp(degree, 1, k_max));
    }
    m.phi_target = m.phi;
    m.phi_opt = Optimizer{config_.high_optimizer, config_.high_lr, {}};
    m.noise = NoiseProcess(config_.noise, static_cast<std::size_t>(k_max) + 1);
    m.explore = Rng(seed, kExploreStream + static_cast<std::uint64_t>(i));
    m.noise_rng = Rng(seed, kNoiseStream + static_cast<std::uint64_t>(i));
  }
}

double Trainer::epsilon() const {
  return config_.epsilon.value(config_.epsilon_unit == CadenceUnit::kStep ? steps_ : episode_);
}

WeightAssignment Trainer::sharing_weights(const std::vector<std::vector<double>>& obs,
                                          const SharingGraph& graph, bool explore, bool target) {
  const double scale = config_.noise_scales_with_epsilon ? epsilon() : 1.0;
  return compute_weights(method_, config_, agents_, obs, graph, explore, target, scale);
}

WeightAssignment Trainer::sharing_weights(const ObservationTable& obs, const SharingGraph& graph,
                                          bool target) const {
  return compute_weights(method_, config_, agents_, obs, graph, false, target, 1.0);
}

void Trainer::begin_episode() {
  current_ = env_->reset();
  active_ = true;
  episode_t_ = 0;
  held_for_ = 0;
  for (auto& m : agents_) m.noise.reset();
  const auto n = static_cast<std::size_t>(n_agents_);
  ep_return_.assign(n, 0.0);
  ep_selfish_.assign(n, 0.0);
  ep_loss_.assign(n, 0.0);
  ep_loss_count_.assign(n, 0);
}

bool Trainer::rollout_step() {
  if (!active_) begin_episode();
  const auto& obs = current_.observations;
  const SharingGraph& graph = *current_.graph;

  if (held_for_ == 0 || !keyed_by(held_, graph)) {
    held_ = sharing_weights(obs, graph, /*explore=*/true, /*target=*/false);
    held_for_ = 0;
  }
  held_for_ = (held_for_ + 1) % config_.action_interval;
  const WeightAssignment& w = held_;
  std::vector<Keyed> w_in = incoming_weights(graph, w);

  const double eps = epsilon();
  std::vector<int> actions(static_cast<std::size_t>(n_agents_), 0);
  for_each_index(n_agents_, config_.execution, [&](int i) {
    const QInput input = make_q_input(i, graph.neighborhood(i), w_in[i], obs);
    actions[i] = select_action(agents_[i].q, input, eps, agents_[i].explore);
  });

  EnvStep next = env_->step(actions);
  const std::vector<double> shaped = share_rewards(graph, w, next.rewards, config_.execution);

  double raw_sum = 0.0;
  double shaped_sum = 0.0;
  for (AgentId i = 0; i < n_agents_; ++i) {
    raw_sum += next.rewards[i];
    shaped_sum += shaped[i];
  }
  const double err = std::abs(shaped_sum - raw_sum) / std::max(1.0, std::abs(raw_sum));
  max_conservation_error_ = std::max(max_conservation_error_, err);

  if (hooks_.on_step) {
    StepTrace trace;
    trace.step = steps_;
    trace.episode = episode_;
    trace.observations = &obs;
    trace.graph = &graph;
    trace.weights = &w;
    trace.actions = actions;
    trace.raw_rewards = next.rewards;
    trace.shaped_rewards = shaped;
    hooks_.on_step(trace);
  }

  for (AgentId i = 0; i < n_agents_; ++i) {
    ep_return_[i] += next.rewards[i];
    ep_selfish_[i] += w.out[i].at(i);
  }

  JointRecord record;
  record.timestamp = steps_;
  record.obs = ObservationTable::from(obs);
  record.next_obs = ObservationTable::from(next.observations);
  record.w_in = std::move(w_in);
  record.actions = std::move(actions);
  record.shaped_rewards = shaped;
  record.graph = current_.graph;
  record.next_graph = next.graph;
  record.done = next.done;
  buffer_.push(std::move(record));

  ++steps_;
  ++episode_t_;
  current_ = std::move(next);
  if (current_.done) active_ = false;
  return current_.done;
}

bool Trainer::high_update_due() const {
  // With no possible neighbor there is nothing for the sharing policy to learn.
  if (method_ != Method::kLtos || config_.high_update_every == 0 || env_->k_max() == 0) {
    return false;
  }
  const auto every = static_cast<std::uint64_t>(config_.high_update_every);
  const std::uint64_t counter =
      config_.high_update_unit == CadenceUnit::kStep ? steps_ : episode_;
  return counter % every == 0;
}

UpdateResult Trainer::update_step() {
  UpdateResult result;
  if (buffer_.size() < config_.sample_size) return result;
  if (steps_ % static_cast<std::uint64_t>(config_.update_every) != 0) return result;

  low_update(result);
  if (high_update_due() && buffer_.size() >= config_.high_sample_size) {
    high_update();
    result.high = true;
  }

  for_each_index(n_agents_, config_.execution, [&](int i) {
    AgentModels& m = agents_[i];
    soft_update(m.q.self_encoder(), m.q_target.self_encoder(), config_.tau);
    soft_update(m.q.neighbor_encoder(), m.q_target.neighbor_encoder(), config_.tau);
    soft_update(m.q.head(), m.q_target.head(), config_.tau);
    if (method_ == Method::kLtos) {
      soft_update(m.phi.network(), m.phi_target.network(), config_.tau);
    }
  });
  return result;
}

void Trainer::low_update(UpdateResult& result) {
  const auto indices = buffer_.sample(sample_rng_, config_.batch_size);
  const int batch = static_cast<int>(indices.size());

  // Target sharing policies re-emit on the next observations.
  std::vector<std::vector<Keyed>> next_in(indices.size());
  for_each_index(batch, config_.execution, [&](int b) {
    const JointRecord& rec = buffer_.record(indices[b]);
    if (rec.done) return;
    const auto w = sharing_weights(rec.next_obs, *rec.next_graph, /*target=*/true);
    next_in[b] = incoming_weights(*rec.next_graph, w);
  });

  result.losses.assign(static_cast<std::size_t>(n_agents_), 0.0);
  std::vector<std::vector<std::uint64_t>> stamps(static_cast<std::size_t>(n_agents_));
  for_each_index(n_agents_, config_.execution, [&](int i) {
    AgentModels& m = agents_[i];
    std::vector<QSample> samples;
    samples.reserve(indices.size());
    for (int b = 0; b < batch; ++b) {
      const Transition tr = buffer_.view(i, indices[b]);
      stamps[i].push_back(tr.timestamp);
      QSample s{make_q_input(i, tr.neighbors, *tr.w_in, *tr.joint_obs), tr.a, tr.r_w};
      if (!tr.done) {
        const QInput next =
            make_q_input(i, tr.neighbors_next, next_in[b][i], *tr.joint_obs_next);
        s.target = td_target(m.q_target, tr.r_w, false, config_.gamma, next);
      }
      samples.push_back(std::move(s));
    }
    result.losses[i] = q_update(m.q, m.q_opt, samples);
  });

  for (AgentId i = 0; i < n_agents_; ++i) {
    if (hooks_.on_sample) hooks_.on_sample(i, stamps[i]);
    if (!ep_loss_.empty()) {
      ep_loss_[i] += result.losses[i];
      ++ep_loss_count_[i];
    }
  }
  result.low = true;
}

void Trainer::high_update() {
  const auto indices = buffer_.sample(sample_rng_, config_.high_batch_size);
  const int batch = static_cast<int>(indices.size());
  std::vector<std::vector<HighSample>> samples(static_cast<std::size_t>(n_agents_),
                                               std::vector<HighSample>(indices.size()));

  for_each_index(batch, config_.execution, [&](int b) {
    const JointRecord& rec = buffer_.record(indices[b]);
    const SharingGraph& graph = *rec.graph;
    const auto w = sharing_weights(rec.obs, graph, /*target=*/false);
    const auto w_in = incoming_weights(graph, w);
    std::vector<Keyed> g_in(static_cast<std::size_t>(n_agents_));
    for (AgentId i = 0; i < n_agents_; ++i) {
      g_in[i] = q_input_gradient(agents_[i].q, make_q_input(i, graph.neighborhood(i), w_in[i], rec.obs));
    }
    auto g_out = route_gradients(graph, g_in);
    for (AgentId i = 0; i < n_agents_; ++i) {
      samples[i][b] = HighSample{i, rec.obs.of(i), graph.neighborhood(i), std::move(g_out[i])};
    }
  });

  // Every g_out for the batch exists before any policy moves.
  for_each_index(n_agents_, config_.execution, [&](int i) {
    policy_update(agents_[i].phi, agents_[i].phi_opt, samples[i]);
  });
}

bool Trainer::run_episode(EpisodeRecord& record) {
  begin_episode();
  for (;;) {
    if (config_.max_steps != 0 && steps_ >= config_.max_steps) {
      active_ = false;
      return false;
    }
    const bool done = rollout_step();
    update_step();
    if (done) break;
  }
  const auto n = static_cast<std::size_t>(n_agents_);
  const double len = static_cast<double>(episode_t_);
  record.episode = episode_;
  record.step = steps_;
  record.length = static_cast<std::uint64_t>(episode_t_);
  record.returns = ep_return_;
  record.rewards.resize(n);
  record.selfishness.resize(n);
  record.q_loss.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    record.rewards[i] = ep_return_[i] / len;
    record.selfishness[i] = ep_selfish_[i] / len;
    record.q_loss[i] = ep_loss_count_[i] == 0
                           ? std::numeric_limits<double>::quiet_NaN()
                           : ep_loss_[i] / static_cast<double>(ep_loss_count_[i]);
  }
  ++episode_;
  return true;
}

EvalRecord Trainer::evaluate(std::vector<TraceRow>* trace) {
  EvalRecord out;
  out.episode = episode_;
  out.step = steps_;
  const std::uint64_t episodes = std::max<std::uint64_t>(1, config_.eval_episodes);
  for (std::uint64_t e = 0; e < episodes; ++e) {
    EnvStep s = eval_env_->reset();
    std::vector<double> ret(static_cast<std::size_t>(n_agents_), 0.0);
    int t = 0;
    while (!s.done) {
      const SharingGraph& graph = *s.graph;
      const auto w = sharing_weights(s.observations, graph, /*explore=*/false, /*target=*/false);
      const auto w_in = incoming_weights(graph, w);
      std::vector<int> actions(static_cast<std::size_t>(n_agents_));
      for (AgentId i = 0; i < n_agents_; ++i) {
        const QInput input = make_q_input(i, graph.neighborhood(i), w_in[i], s.observations);
        actions[i] = argmax(agents_[i].q.q_values(input));
      }
      EnvStep next = eval_env_->step(actions);
      for (AgentId i = 0; i < n_agents_; ++i) {
        ret[i] += next.rewards[i];
        if (trace != nullptr && e == 0) {
          trace->push_back(TraceRow{t, i, s.observations[i], actions[i], next.rewards[i]});
        }
      }
      ++t;
      s = std::move(next);
    }
    double sum = 0.0;
    for (double r : ret) sum += r;
    out.average_return += sum / n_agents_;
    out.average_reward += sum / (static_cast<double>(n_agents_) * std::max(1, t));
  }
  out.average_return /= static_cast<double>(episodes);
  out.average_reward /= static_cast<double>(episodes);
  return out;
}

MetricsTable Trainer::train() {
  MetricsTable table;
  train(table);
  return table;
}

void Trainer::train(MetricsTable& table) {
  for (std::uint64_t e = 0; e < config_.episodes; ++e) {
    EpisodeRecord record;
    const bool finished = run_episode(record);
    table.steps = steps_;
    table.max_conservation_error = max_conservation_error_;
    if (!finished) break;
    table.episodes.push_back(std::move(record));
    if (episode_ % config_.eval_interval == 0) table.evals.push_back(evaluate());
  }
  if (!table.episodes.empty() && (table.evals.empty() || table.evals.back().episode != episode_)) {
    table.evals.push_back(evaluate());
  }
  table.steps = steps_;
  table.max_conservation_error = max_conservation_error_;
}

void Trainer::save_checkpoint(const std::string& dir) const {
  for (AgentId i = 0; i < n_agents_; ++i) {
    const auto base = agent_dir(dir, i);
    std::filesystem::create_directories(base);
    const AgentModels& m = agents_[i];
    auto q = open_out(base / "q.bin");
    write_q_network(q, m.q);
    auto qt = open_out(base / "q_target.bin");
    write_q_network(qt, m.q_target);
    auto phi = open_out(base / "phi.bin");
    write_mlp(phi, m.phi.network());
    auto phit = open_out(base / "phi_target.bin");
    write_mlp(phit, m.phi_target.network());
  }
}

void Trainer::load_checkpoint(const std::string& dir) {
  for (AgentId i = 0; i < n_agents_; ++i) {
    const auto base = agent_dir(dir, i);
    AgentModels& m = agents_[i];
    auto q = open_in(base / "q.bin");
    QNetwork loaded = read_q_network(q);
    auto qt = open_in(base / "q_target.bin");
    QNetwork loaded_target = read_q_network(qt);
    if (loaded.obs_size() != m.q.obs_size() || loaded.n_actions() != m.q.n_actions() ||
        loaded_target.obs_size() != m.q.obs_size()) {
      throw std::runtime_error("checkpoint: Q-network shape mismatch for agent " +
                               std::to_string(i));
    }
    m.q = std::move(loaded);
    m.q_target = std::move(loaded_target);
    m.phi.network() = read_shaped(base / "phi.bin", m.phi.network());
    m.phi_target.network() = read_shaped(base / "phi_target.bin", m.phi_target.network());
  }
}

}  // namespace ltos
