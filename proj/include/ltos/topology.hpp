#ifndef LTOS_TOPOLOGY_HPP
#define LTOS_TOPOLOGY_HPP

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ltos {

using AgentId = int;
using Edge = std::pair<AgentId, AgentId>;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Communication graph plus the derived directed sharing edges. Every agent
// owns a self-loop; each undirected edge {i,j} yields (i,j) and (j,i).
// Neighborhoods include the agent itself and are sorted by id.
class SharingGraph {
 public:
  SharingGraph() = default;

  int n_agents() const { return static_cast<int>(neighborhoods_.size()); }
  int k_max() const { return k_max_; }

  // Canonical undirected edges, each stored as (min, max), sorted.
  const std::vector<Edge>& undirected_edges() const { return edges_; }
  std::vector<Edge> directed_edges() const;
  std::size_t directed_edge_count() const;

  std::span<const AgentId> neighborhood(AgentId i) const {
    return neighborhoods_.at(static_cast<std::size_t>(i));
  }
  bool adjacent(AgentId i, AgentId j) const { return slot_of(i, j) >= 0; }
  // Index of j inside neighborhood(i), or -1.
  int slot_of(AgentId i, AgentId j) const;

  bool operator==(const SharingGraph&) const = default;

 private:
  friend SharingGraph build_graph(int, std::span<const Edge>, int);

  int k_max_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<AgentId>> neighborhoods_;
};

// Throws std::invalid_argument on out-of-range endpoints, self edges,
// duplicate edges, or a degree above k_max.
SharingGraph build_graph(int n_agents, std::span<const Edge> undirected_edges,
                         int k_max);

SharingGraph fully_connected(int n_agents);

// Each agent links to its k nearest agents (ties by lower id); the edge set
// is the symmetric closure of that relation. k_max < 0 means n - 1.
SharingGraph knn_neighborhoods(std::span<const Vec2> positions, int k,
                               int k_max = -1);

// Text format: "n k_max" header, then one "i j" line per undirected edge.
void write_graph(std::ostream& out, const SharingGraph& graph);
SharingGraph read_graph(std::istream& in);

}  // namespace ltos

#endif  // LTOS_TOPOLOGY_HPP
