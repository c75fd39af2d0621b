#pragma once

#include <vector>

#include "gasket/errors.hpp"
#include "gasket/graph.hpp"

namespace gasket {

// Real-valued function on V_n, indexed like the graph's vertex list.
struct Field {
  int level = 0;
  std::vector<double> v;

  double& operator[](VertexId i) { return v[i]; }
  double operator[](VertexId i) const { return v[i]; }
  std::size_t size() const { return v.size(); }
};

inline Field make_field(const GasketGraph& g, double fill = 0.0) {
  return Field{g.level(), std::vector<double>(g.vertex_count(), fill)};
}

inline void require_same_level(const GasketGraph& g, const Field& u, const char* what) {
  if (u.level != g.level() || u.v.size() != static_cast<std::size_t>(g.vertex_count()))
    throw validation_error(std::string(what) + ": field level/size does not match graph");
}

} // namespace gasket
