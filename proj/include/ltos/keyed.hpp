#ifndef LTOS_KEYED_HPP
#define LTOS_KEYED_HPP

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "ltos/topology.hpp"

namespace ltos {

// Reals keyed by agent id, keys strictly ascending. Used for sharing weights
// (w_out, w_in) and the exchanged weight gradients (g_in, g_out).
struct Keyed {
  std::vector<AgentId> keys;
  std::vector<double> values;

  std::size_t size() const { return keys.size(); }

  int find(AgentId id) const {
    auto it = std::lower_bound(keys.begin(), keys.end(), id);
    if (it == keys.end() || *it != id) return -1;
    return static_cast<int>(it - keys.begin());
  }

  double at(AgentId id) const {
    const int pos = find(id);
    if (pos < 0) throw std::out_of_range("Keyed::at: no key " + std::to_string(id));
    return values[static_cast<std::size_t>(pos)];
  }

  bool has_keys(std::span<const AgentId> expected) const {
    return std::equal(keys.begin(), keys.end(), expected.begin(), expected.end());
  }

  bool operator==(const Keyed&) const = default;
};

}  // namespace ltos

#endif  // LTOS_KEYED_HPP
