#ifndef LTOS_HIGH_POLICY_HPP
#define LTOS_HIGH_POLICY_HPP

#include <span>
#include <string>
#include <vector>

#include "ltos/keyed.hpp"
#include "ltos/mlp.hpp"
#include "ltos/optimizer.hpp"
#include "ltos/rng.hpp"
#include "ltos/topology.hpp"

namespace ltos {

// Deterministic sharing policy phi_i: o_i -> logits over 1 + k_max slots.
// Slot 0 is the agent itself, slots 1.. are the other members of N_i in
// ascending id order. A softmax over the active slots gives w_i^out; padded
// slots get exactly zero.
class HighPolicy {
 public:
  HighPolicy() = default;
  HighPolicy(std::size_t obs_size, std::size_t hidden, int k_max);

  void initialize(Rng& rng, Init init = Init::kUniform, double stddev = 0.1);

  int k_max() const { return static_cast<int>(net_.output_size()) - 1; }
  Mlp& network() { return net_; }
  const Mlp& network() const { return net_; }

  std::vector<double> logits(std::span<const double> obs) const { return net_.forward(obs); }

  bool operator==(const HighPolicy&) const = default;

 private:
  Mlp net_;
};

// Sets the output layer so the initial emission is s0 for the self slot and
// (1 - s0) / k_active for each neighbor: zero output weights, self bias
// ln(s0 * k_active / (1 - s0)), other biases 0. Throws unless s0 in (0,1)
// and 1 <= k_active <= k_max.
void init_selfishness(HighPolicy& policy, double s0, int k_active);

enum class NoiseKind { kNone, kEpsilonGaussian, kOrnsteinUhlenbeck };

std::string to_string(NoiseKind kind);
NoiseKind noise_from_string(const std::string& name);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kNone;
  double epsilon = 0.8;  // epsilon-Gaussian: probability of perturbing
  double sigma = 1.0;
  double theta = 0.15;   // OU mean reversion

  bool operator==(const NoiseSpec&) const = default;
};

// Logit-space exploration noise, one process per agent.
class NoiseProcess {
 public:
  NoiseProcess() = default;
  NoiseProcess(NoiseSpec spec, std::size_t dim);

  void reset();
  // sigma_scale multiplies sigma (OU sigma may track the exploration rate).
  std::vector<double> sample(Rng& rng, double sigma_scale = 1.0);
  const std::vector<double>& state() const { return state_; }
  const NoiseSpec& spec() const { return spec_; }

 private:
  NoiseSpec spec_;
  std::vector<double> state_;
};

// Masked softmax of (logits + noise) over the slots of `neighborhood`,
// keyed by agent id.
Keyed weights_from_logits(AgentId self, std::span<const AgentId> neighborhood,
                          std::span<const double> logits, std::span<const double> noise = {});

Keyed emit_weights(const HighPolicy& policy, AgentId self, std::span<const double> obs,
                   std::span<const AgentId> neighborhood, NoiseProcess* noise, Rng* rng,
                   double sigma_scale = 1.0);

// g_out[i][j] = g_in[j][i] for every directed edge (i, j).
std::vector<Keyed> route_gradients(const SharingGraph& graph, const std::vector<Keyed>& g_in);

struct HighSample {
  AgentId self = 0;
  std::span<const double> obs;
  std::span<const AgentId> neighborhood;
  Keyed g_out;
};

// Batch mean of (d phi / d theta)^T g_out, pulled back through the masked
// softmax. This is the ascent direction.
std::vector<double> policy_gradient(const HighPolicy& policy, std::span<const HighSample> batch);

// theta <- theta + lr * policy_gradient (through `opt`).
void policy_update(HighPolicy& policy, Optimizer& opt, std::span<const HighSample> batch);

}  // namespace ltos

#endif  // LTOS_HIGH_POLICY_HPP
