#include "ltos/high_policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ltos {
namespace {

// slot -> agent id: self first, then the rest of the neighborhood.
std::vector<AgentId> slot_ids(AgentId self, std::span<const AgentId> neighborhood, int k_max) {
  if (static_cast<int>(neighborhood.size()) > k_max + 1) {
    throw std::invalid_argument("high policy: neighborhood of " +
                                std::to_string(neighborhood.size()) + " exceeds k_max + 1 = " +
                                std::to_string(k_max + 1));
  }
  std::vector<AgentId> ids{self};
  bool has_self = false;
  for (AgentId j : neighborhood) {
    if (j == self) {
      has_self = true;
    } else {
      ids.push_back(j);
    }
  }
  if (!has_self) throw std::invalid_argument("high policy: neighborhood lacks self");
  return ids;
}

std::vector<double> masked_softmax(std::span<const double> logits, std::size_t active,
                                   std::span<const double> noise) {
  std::vector<double> z(active);
  for (std::size_t s = 0; s < active; ++s) z[s] = logits[s] + (noise.empty() ? 0.0 : noise[s]);
  const double peak = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double& v : z) total += (v = std::exp(v - peak));
  for (double& v : z) v /= total;
  return z;
}

}  // namespace

HighPolicy::HighPolicy(std::size_t obs_size, std::size_t hidden, int k_max)
    : net_({obs_size, hidden, hidden, static_cast<std::size_t>(k_max) + 1}, Activation::kRelu,
           Activation::kIdentity) {}

void HighPolicy::initialize(Rng& rng, Init init, double stddev) { net_.initialize(rng, init, stddev); }

void init_selfishness(HighPolicy& policy, double s0, int k_active) {
  if (!(s0 > 0.0 && s0 < 1.0)) {
    throw std::invalid_argument("init_selfishness: s0=" + std::to_string(s0) + " outside (0,1)");
  }
  if (k_active < 1 || k_active > policy.k_max()) {
    throw std::invalid_argument("init_selfishness: k_active=" + std::to_string(k_active) +
                                " outside [1, k_max]");
  }
  Mlp& net = policy.network();
  const std::size_t last = net.layers().size() - 1;
  std::ranges::fill(net.weights(last), 0.0);
  auto bias = net.bias(last);
  std::ranges::fill(bias, 0.0);
  bias[0] = std::log(s0 * k_active / (1.0 - s0));
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kNone:
      return "none";
    case NoiseKind::kEpsilonGaussian:
      return "eps_gaussian";
    case NoiseKind::kOrnsteinUhlenbeck:
      return "ou";
  }
  return "?";
}

NoiseKind noise_from_string(const std::string& name) {
  if (name == "none") return NoiseKind::kNone;
  if (name == "eps_gaussian") return NoiseKind::kEpsilonGaussian;
  if (name == "ou") return NoiseKind::kOrnsteinUhlenbeck;
  throw std::invalid_argument("unknown noise kind '" + name + "'");
}

NoiseProcess::NoiseProcess(NoiseSpec spec, std::size_t dim) : spec_(spec), state_(dim, 0.0) {}

void NoiseProcess::reset() { std::ranges::fill(state_, 0.0); }

std::vector<double> NoiseProcess::sample(Rng& rng, double sigma_scale) {
  const double sigma = spec_.sigma * sigma_scale;
  switch (spec_.kind) {
    case NoiseKind::kNone:
      return std::vector<double>(state_.size(), 0.0);
    case NoiseKind::kEpsilonGaussian: {
      std::vector<double> out(state_.size(), 0.0);
      if (rng.uniform() < spec_.epsilon) {
        for (double& v : out) v = sigma * rng.normal();
      }
      return out;
    }
    case NoiseKind::kOrnsteinUhlenbeck:
      for (double& x : state_) x += -spec_.theta * x + sigma * rng.normal();
      return state_;
  }
  return state_;
}

Keyed weights_from_logits(AgentId self, std::span<const AgentId> neighborhood,
                          std::span<const double> logits, std::span<const double> noise) {
  const int k_max = static_cast<int>(logits.size()) - 1;
  const auto ids = slot_ids(self, neighborhood, k_max);
  if (!noise.empty() && noise.size() < ids.size()) {
    throw std::invalid_argument("high policy: noise narrower than the active slots");
  }
  const auto p = masked_softmax(logits, ids.size(), noise);
  Keyed out;
  out.keys.assign(neighborhood.begin(), neighborhood.end());
  out.values.resize(out.keys.size());
  for (std::size_t s = 0; s < ids.size(); ++s) out.values[out.find(ids[s])] = p[s];
  return out;
}

Keyed emit_weights(const HighPolicy& policy, AgentId self, std::span<const double> obs,
                   std::span<const AgentId> neighborhood, NoiseProcess* noise, Rng* rng,
                   double sigma_scale) {
  const auto logits = policy.logits(obs);
  if (noise == nullptr || noise->spec().kind == NoiseKind::kNone) {
    return weights_from_logits(self, neighborhood, logits);
  }
  if (rng == nullptr) throw std::invalid_argument("emit_weights: noise needs a generator");
  const auto perturbation = noise->sample(*rng, sigma_scale);
  return weights_from_logits(self, neighborhood, logits, perturbation);
}

std::vector<Keyed> route_gradients(const SharingGraph& graph, const std::vector<Keyed>& g_in) {
  const int n = graph.n_agents();
  if (static_cast<int>(g_in.size()) != n) {
    throw std::invalid_argument("route_gradients: expected one map per agent");
  }
  for (AgentId i = 0; i < n; ++i) {
    if (!g_in[i].has_keys(graph.neighborhood(i)) || g_in[i].values.size() != g_in[i].keys.size()) {
      throw std::invalid_argument("route_gradients: g_in of agent " + std::to_string(i) +
                                  " is not keyed by its neighborhood");
    }
  }
  std::vector<Keyed> g_out(static_cast<std::size_t>(n));
  for (AgentId i = 0; i < n; ++i) {
    auto hood = graph.neighborhood(i);
    g_out[i].keys.assign(hood.begin(), hood.end());
    g_out[i].values.resize(hood.size());
    for (std::size_t s = 0; s < hood.size(); ++s) g_out[i].values[s] = g_in[hood[s]].at(i);
  }
  return g_out;
}

std::vector<double> policy_gradient(const HighPolicy& policy, std::span<const HighSample> batch) {
  const Mlp& net = policy.network();
  std::vector<double> grad(net.param_count(), 0.0);
  if (batch.empty()) return grad;
  Tape tape;
  std::vector<double> upstream(net.output_size());
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (const HighSample& sample : batch) {
    if (!sample.g_out.has_keys(sample.neighborhood)) {
      throw std::invalid_argument("policy_update: g_out not keyed by the record's neighborhood");
    }
    const auto ids = slot_ids(sample.self, sample.neighborhood, policy.k_max());
    net.forward(sample.obs, tape);
    const auto p = masked_softmax(tape.output(), ids.size(), {});
    double mean_g = 0.0;
    for (std::size_t s = 0; s < ids.size(); ++s) mean_g += p[s] * sample.g_out.at(ids[s]);
    std::ranges::fill(upstream, 0.0);
    for (std::size_t s = 0; s < ids.size(); ++s) {
      upstream[s] = inv * p[s] * (sample.g_out.at(ids[s]) - mean_g);
    }
    net.backward(tape, upstream, grad, {});
  }
  for (double g : grad) {
    if (!std::isfinite(g)) throw std::domain_error("policy_update: non-finite gradient");
  }
  return grad;
}

void policy_update(HighPolicy& policy, Optimizer& opt, std::span<const HighSample> batch) {
  auto grad = policy_gradient(policy, batch);
  for (double& g : grad) g = -g;
  opt.descend(policy.network().params(), grad);
}

}  // namespace ltos
