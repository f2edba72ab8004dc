#ifndef LTOS_Q_NETWORK_HPP
#define LTOS_Q_NETWORK_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ltos/keyed.hpp"
#include "ltos/mlp.hpp"
#include "ltos/observation.hpp"
#include "ltos/optimizer.hpp"
#include "ltos/rng.hpp"
#include "ltos/topology.hpp"

namespace ltos {

// A neighbor j != i as seen by agent i: its exchanged observation and the
// incoming weight w_ji.
struct NeighborSlot {
  AgentId id = 0;
  double weight = 0.0;
  std::span<const double> features;
};

struct QInput {
  AgentId self = 0;
  std::span<const double> obs;
  double self_weight = 1.0;  // w_ii
  std::vector<NeighborSlot> neighbors;
};

// Builds the input for agent `self` from the joint observations. Throws
// std::invalid_argument when w_in is not keyed exactly by `neighborhood`.
QInput make_q_input(AgentId self, std::span<const AgentId> neighborhood, const Keyed& w_in,
                    const std::vector<std::vector<double>>& observations);
QInput make_q_input(AgentId self, std::span<const AgentId> neighborhood, const Keyed& w_in,
                    const ObservationTable& observations);

struct QGradients {
  std::vector<double> self;
  std::vector<double> neighbor;
  std::vector<double> head;
};

// Per-agent action-value network over (observation, incoming weights):
//   h_self = relu(A [o_i, w_ii]),  h_j = relu(B [o_j, w_ji]),
//   Q = head([h_self, mean_j h_j]).
// The mean runs over real neighbors only and is taken in id order, so the
// output does not depend on the order of the slots handed in.
class QNetwork {
 public:
  QNetwork() = default;
  QNetwork(std::size_t obs_size, std::size_t hidden, int n_actions);

  void initialize(Rng& rng, Init init = Init::kUniform, double stddev = 0.1);

  int n_actions() const { return static_cast<int>(head_.output_size()); }
  std::size_t obs_size() const { return self_.input_size() - 1; }

  Mlp& self_encoder() { return self_; }
  Mlp& neighbor_encoder() { return neighbor_; }
  Mlp& head() { return head_; }
  const Mlp& self_encoder() const { return self_; }
  const Mlp& neighbor_encoder() const { return neighbor_; }
  const Mlp& head() const { return head_; }

  struct Tape {
    ltos::Tape self;
    std::vector<ltos::Tape> neighbors;  // sorted by id
    std::vector<AgentId> order;         // neighbor ids in tape order
    ltos::Tape head;
  };

  std::vector<double> q_values(const QInput& input) const;
  void forward(const QInput& input, Tape& tape) const;

  // Reverse pass for <upstream, Q>. Parameter gradients are added into
  // `grads` (if non-null, sized by zero_gradients); d/dw for the incoming
  // weights goes to `weight_grads` as a Keyed over {self} + neighbors.
  void backward(const Tape& tape, AgentId self, std::span<const double> upstream,
                QGradients* grads, Keyed* weight_grads) const;

  QGradients zero_gradients() const;

  bool operator==(const QNetwork&) const = default;

 private:
  Mlp self_;
  Mlp neighbor_;
  Mlp head_;
};

// Lowest index among the maxima.
int argmax(std::span<const double> values);

struct EpsilonSchedule {
  double start = 0.8;
  double decay = 1.0;
  double end = 0.8;

  double value(std::uint64_t n) const;

  bool operator==(const EpsilonSchedule&) const = default;
};

// Draws one uniform for the explore test, then one index when exploring.
int select_action(const QNetwork& net, const QInput& input, double epsilon, Rng& rng);

// y = r_w if done, else r_w + gamma * max_a Q_target(o', w_in').
double td_target(const QNetwork& target, double shaped_reward, bool done, double gamma,
                 const QInput& next_input);

struct QSample {
  QInput input;  // stored o and behavior w_in
  int action = 0;
  double target = 0.0;
};

// Optimizers for the three parameter blocks of one QNetwork.
struct QOptimizer {
  std::array<Optimizer, 3> blocks;

  static QOptimizer make(OptimizerKind kind, double lr);
};

// One descent step on mean (y - Q(o, a; w_in))^2. Returns the pre-step loss.
double q_update(QNetwork& net, QOptimizer& opt, std::span<const QSample> batch);

// d Q(o, argmax_a Q; w_in) / d w_ji for every j in N_i (self included).
Keyed q_input_gradient(const QNetwork& net, const QInput& input);

void write_q_network(std::ostream& out, const QNetwork& net);
QNetwork read_q_network(std::istream& in);

}  // namespace ltos

#endif  // LTOS_Q_NETWORK_HPP
