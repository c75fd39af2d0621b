#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "gasket/address.hpp"

namespace gasket {

using VertexId = std::int32_t;

// Upward triangle on the level-n lattice: corners at anchor, anchor + (side, 0)
// and anchor + (0, side). All cells and blocks of the gasket have this shape.
struct LatticeCell {
  std::int64_t ai = 0;
  std::int64_t aj = 0;
  std::int64_t side = 1;

  bool contains(std::int64_t pi, std::int64_t pj) const {
    const std::int64_t di = pi - ai, dj = pj - aj;
    return di >= 0 && dj >= 0 && di + dj <= side;
  }
};

// Vertex indices of the level-(n-k) triangle T_n^k(x) around a vertex,
// together with the V_n vertices it contains.
struct TriangleBlock {
  int level = 0;  // n of the host graph
  int scale = 0;  // k; member count is 3(3^k+1)/2
  LatticeCell cell;                   // in level-n lattice units, side = 2^k
  std::array<VertexId, 3> corners{};  // cell corners, elements of V_{n-k}
  std::vector<VertexId> members;      // ascending vertex ids
};

// Immutable level-n graph approximation of the gasket. Construction is by
// recursive triangle subdivision with vertex deduplication; vertex order is
// sorted by (j, i), which fixes all derived indexing.
class GasketGraph {
public:
  static constexpr int kDefaultMaxLevel = 12;

  // Levels above the cap (env GASKET_MAX_LEVEL, default 12) raise capacity_error.
  static GasketGraph build(int level);
  static int max_level();

  int level() const { return level_; }
  std::int64_t span() const { return std::int64_t{1} << level_; }
  VertexId vertex_count() const { return static_cast<VertexId>(vertices_.size()); }
  std::size_t edge_count() const { return edges_.size(); }
  double measure_weight() const { return measure_weight_; }  // 3^-n per vertex

  const std::vector<Address>& vertices() const { return vertices_; }
  const Address& address(VertexId v) const { return vertices_[v]; }
  ExactPoint coordinates(VertexId v) const;

  const std::vector<std::array<VertexId, 2>>& edges() const { return edges_; }
  const std::array<VertexId, 3>& boundary() const { return boundary_; }
  bool is_boundary(VertexId v) const {
    return v == boundary_[0] || v == boundary_[1] || v == boundary_[2];
  }
  VertexId interior_count() const { return vertex_count() - 3; }

  int degree(VertexId v) const { return adj_offset_[v + 1] - adj_offset_[v]; }
  const VertexId* neighbors_begin(VertexId v) const { return adj_.data() + adj_offset_[v]; }
  const VertexId* neighbors_end(VertexId v) const { return adj_.data() + adj_offset_[v + 1]; }

  // 3^n level-n cells; each stores its vertex ids in (anchor, +e1, +e2) order.
  const std::vector<std::array<VertexId, 3>>& cells() const { return cells_; }
  // The one or two cells a vertex belongs to.
  const std::array<std::int32_t, 2>& vertex_cells(VertexId v) const { return vertex_cells_[v]; }

  VertexId index_of(const Address& a) const;          // validation_error if absent
  VertexId find(const Address& a) const;              // -1 if absent

  // Triangle block of scale k around vertex v. For v in V_{n-k} the two
  // candidate triangles are disambiguated by the lexicographically larger
  // corner centroid in exact (x, y) coordinates.
  TriangleBlock block_of(VertexId v, int k) const;
  std::vector<TriangleBlock> enumerate_blocks(int k) const;

private:
  TriangleBlock make_block(const LatticeCell& cell, int k) const;
  LatticeCell ancestor_cell(std::int32_t cell_index, int generations) const;

  int level_ = 0;
  double measure_weight_ = 1.0;
  std::vector<Address> vertices_;
  std::vector<std::array<VertexId, 2>> edges_;
  std::array<VertexId, 3> boundary_{};
  std::vector<VertexId> adj_;
  std::vector<std::int32_t> adj_offset_;
  std::vector<std::array<VertexId, 3>> cells_;
  std::vector<LatticeCell> cell_geom_;
  std::vector<std::array<std::int32_t, 2>> vertex_cells_;
  std::unordered_map<Address, VertexId, AddressHash> index_;
};

// 3(3^n+1)/2 and 3^{n+1}: the counting formulas tested against construction.
std::int64_t expected_vertex_count(int level);
std::int64_t expected_edge_count(int level);

} // namespace gasket
