#include "ltos/topology.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ltos {

std::vector<Edge> SharingGraph::directed_edges() const {
  std::vector<Edge> out;
  out.reserve(directed_edge_count());
  for (AgentId i = 0; i < n_agents(); ++i) {
    for (AgentId j : neighborhood(i)) out.emplace_back(i, j);
  }
  return out;
}

std::size_t SharingGraph::directed_edge_count() const {
  return static_cast<std::size_t>(n_agents()) + 2 * edges_.size();
}

int SharingGraph::slot_of(AgentId i, AgentId j) const {
  if (i < 0 || i >= n_agents()) return -1;
  const auto& hood = neighborhoods_[static_cast<std::size_t>(i)];
  auto it = std::lower_bound(hood.begin(), hood.end(), j);
  if (it == hood.end() || *it != j) return -1;
  return static_cast<int>(it - hood.begin());
}

SharingGraph build_graph(int n_agents, std::span<const Edge> undirected_edges,
                         int k_max) {
  if (n_agents < 0) throw std::invalid_argument("build_graph: negative agent count");
  if (k_max < 0) throw std::invalid_argument("build_graph: negative k_max");
  SharingGraph g;
  g.k_max_ = k_max;
  g.neighborhoods_.assign(static_cast<std::size_t>(n_agents), {});
  std::set<Edge> seen;
  for (auto [a, b] : undirected_edges) {
    if (a < 0 || a >= n_agents || b < 0 || b >= n_agents) {
      std::ostringstream msg;
      msg << "build_graph: edge {" << a << "," << b << "} has an endpoint outside [0,"
          << n_agents << ")";
      throw std::invalid_argument(msg.str());
    }
    if (a == b) {
      throw std::invalid_argument("build_graph: self edge {" + std::to_string(a) +
                                  "} (self-loops are implicit)");
    }
    Edge canon{std::min(a, b), std::max(a, b)};
    if (!seen.insert(canon).second) {
      std::ostringstream msg;
      msg << "build_graph: duplicate edge {" << canon.first << "," << canon.second << "}";
      throw std::invalid_argument(msg.str());
    }
  }
  g.edges_.assign(seen.begin(), seen.end());
  for (AgentId i = 0; i < n_agents; ++i) g.neighborhoods_[i].push_back(i);
  for (auto [a, b] : g.edges_) {
    g.neighborhoods_[a].push_back(b);
    g.neighborhoods_[b].push_back(a);
  }
  for (AgentId i = 0; i < n_agents; ++i) {
    auto& hood = g.neighborhoods_[i];
    std::sort(hood.begin(), hood.end());
    if (static_cast<int>(hood.size()) - 1 > k_max) {
      std::ostringstream msg;
      msg << "build_graph: agent " << i << " has degree " << hood.size() - 1
          << " > k_max " << k_max;
      throw std::invalid_argument(msg.str());
    }
  }
  return g;
}

SharingGraph fully_connected(int n_agents) {
  std::vector<Edge> edges;
  for (AgentId i = 0; i < n_agents; ++i) {
    for (AgentId j = i + 1; j < n_agents; ++j) edges.emplace_back(i, j);
  }
  return build_graph(n_agents, edges, std::max(0, n_agents - 1));
}

SharingGraph knn_neighborhoods(std::span<const Vec2> positions, int k, int k_max) {
  const int n = static_cast<int>(positions.size());
  if (k < 0 || k >= std::max(n, 1)) {
    throw std::invalid_argument("knn_neighborhoods: k=" + std::to_string(k) +
                                " must be < n_agents=" + std::to_string(n));
  }
  if (k_max < 0) k_max = std::max(0, n - 1);
  std::set<Edge> edges;
  std::vector<AgentId> order(static_cast<std::size_t>(n));
  std::vector<double> dist2(static_cast<std::size_t>(n));
  for (AgentId i = 0; i < n; ++i) {
    for (AgentId j = 0; j < n; ++j) {
      const double dx = positions[j].x - positions[i].x;
      const double dy = positions[j].y - positions[i].y;
      dist2[j] = dx * dx + dy * dy;
    }
    order.resize(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::erase(order, i);
    std::partial_sort(order.begin(), order.begin() + k, order.end(),
                      [&](AgentId a, AgentId b) {
                        return dist2[a] != dist2[b] ? dist2[a] < dist2[b] : a < b;
                      });
    for (int r = 0; r < k; ++r) {
      const AgentId j = order[r];
      edges.emplace(std::min(i, j), std::max(i, j));
    }
  }
  std::vector<Edge> list(edges.begin(), edges.end());
  return build_graph(n, list, k_max);
}

void write_graph(std::ostream& out, const SharingGraph& graph) {
  out << graph.n_agents() << ' ' << graph.k_max() << '\n';
  for (auto [a, b] : graph.undirected_edges()) out << a << ' ' << b << '\n';
}

SharingGraph read_graph(std::istream& in) {
  int n = 0;
  int k_max = 0;
  if (!(in >> n >> k_max)) throw std::invalid_argument("read_graph: missing 'n k_max' header");
  std::vector<AgentId> ends;
  AgentId v = 0;
  while (in >> v) ends.push_back(v);
  if (!in.eof()) throw std::invalid_argument("read_graph: non-numeric edge endpoint");
  if (ends.size() % 2 != 0) throw std::invalid_argument("read_graph: dangling edge endpoint");
  std::vector<Edge> edges;
  for (std::size_t e = 0; e < ends.size(); e += 2) edges.emplace_back(ends[e], ends[e + 1]);
  return build_graph(n, edges, k_max);
}

}  // namespace ltos
