#ifndef LTOS_OBSERVATION_HPP
#define LTOS_OBSERVATION_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "ltos/topology.hpp"

namespace ltos {

// Joint observations of all agents in one flat row-major buffer.
struct ObservationTable {
  std::size_t dim = 0;
  std::vector<double> data;

  static ObservationTable from(const std::vector<std::vector<double>>& rows) {
    ObservationTable t;
    t.dim = rows.empty() ? 0 : rows.front().size();
    t.data.reserve(rows.size() * t.dim);
    for (const auto& r : rows) {
      if (r.size() != t.dim) throw std::invalid_argument("observations have ragged widths");
      t.data.insert(t.data.end(), r.begin(), r.end());
    }
    return t;
  }

  int n_agents() const { return dim == 0 ? 0 : static_cast<int>(data.size() / dim); }

  std::span<const double> of(AgentId i) const {
    if (i < 0 || i >= n_agents()) throw std::out_of_range("observation of unknown agent");
    return std::span<const double>(data).subspan(static_cast<std::size_t>(i) * dim, dim);
  }
};

}  // namespace ltos

#endif  // LTOS_OBSERVATION_HPP
