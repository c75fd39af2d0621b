#include "gasket/graph.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "gasket/errors.hpp"

namespace gasket {

std::int64_t expected_vertex_count(int level) {
  std::int64_t p = 1;
  for (int t = 0; t < level; ++t) p *= 3;
  return 3 * (p + 1) / 2;
}

std::int64_t expected_edge_count(int level) {
  std::int64_t p = 3;
  for (int t = 0; t < level; ++t) p *= 3;
  return p;
}

int GasketGraph::max_level() {
  if (const char* env = std::getenv("GASKET_MAX_LEVEL")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 0 && v <= 30) return static_cast<int>(v);
  }
  return kDefaultMaxLevel;
}

namespace {

// Depth-first subdivision of the unit triangle; emits the 3^n level-n cells in
// a fixed order (anchor child, then +e1 child, then +e2 child).
template <class Fn>
void for_each_cell(std::int64_t ai, std::int64_t aj, std::int64_t side, const Fn& emit) {
  if (side == 1) {
    emit(ai, aj);
    return;
  }
  const std::int64_t h = side / 2;
  for_each_cell(ai, aj, h, emit);
  for_each_cell(ai + h, aj, h, emit);
  for_each_cell(ai, aj + h, h, emit);
}

} // namespace

GasketGraph GasketGraph::build(int level) {
  if (level < 0) throw validation_error("graph level must be non-negative");
  if (level > max_level())
    throw capacity_error("graph level " + std::to_string(level) +
                         " exceeds configured cap " + std::to_string(max_level()));

  GasketGraph g;
  g.level_ = level;
  g.measure_weight_ = 1.0;
  for (int t = 0; t < level; ++t) g.measure_weight_ /= 3.0;

  const std::int64_t span = std::int64_t{1} << level;

  std::vector<std::array<std::int64_t, 2>> anchors;
  anchors.reserve(static_cast<std::size_t>(expected_edge_count(level) / 3));
  for_each_cell(0, 0, span, [&](std::int64_t ai, std::int64_t aj) {
    anchors.push_back({ai, aj});
  });

  // collect unique vertices, then fix the (j, i) sort order
  std::unordered_map<Address, VertexId, AddressHash> seen;
  seen.reserve(anchors.size() * 2);
  std::vector<Address> verts;
  verts.reserve(anchors.size() * 2);
  auto touch = [&](std::int64_t i, std::int64_t j) {
    Address a{i, j, level};
    if (seen.emplace(a, 0).second) verts.push_back(a);
  };
  for (const auto& [ai, aj] : anchors) {
    touch(ai, aj);
    touch(ai + 1, aj);
    touch(ai, aj + 1);
  }
  std::sort(verts.begin(), verts.end(), [](const Address& a, const Address& b) {
    return a.j != b.j ? a.j < b.j : a.i < b.i;
  });
  g.vertices_ = std::move(verts);
  g.index_.reserve(g.vertices_.size() * 2);
  for (VertexId v = 0; v < static_cast<VertexId>(g.vertices_.size()); ++v)
    g.index_.emplace(g.vertices_[v], v);

  g.boundary_ = {g.index_.at(Address{0, 0, level}), g.index_.at(Address{0, span, level}),
                 g.index_.at(Address{span, 0, level})};

  g.cells_.reserve(anchors.size());
  g.cell_geom_.reserve(anchors.size());
  g.vertex_cells_.assign(g.vertices_.size(), {-1, -1});
  auto note_cell = [&](VertexId v, std::int32_t c) {
    auto& slots = g.vertex_cells_[v];
    if (slots[0] < 0) slots[0] = c;
    else slots[1] = c;
  };
  g.edges_.reserve(static_cast<std::size_t>(expected_edge_count(level)));
  for (const auto& [ai, aj] : anchors) {
    const VertexId a = g.index_.at(Address{ai, aj, level});
    const VertexId b = g.index_.at(Address{ai + 1, aj, level});
    const VertexId c = g.index_.at(Address{ai, aj + 1, level});
    const std::int32_t ci = static_cast<std::int32_t>(g.cells_.size());
    g.cells_.push_back({a, b, c});
    g.cell_geom_.push_back(LatticeCell{ai, aj, 1});
    note_cell(a, ci);
    note_cell(b, ci);
    note_cell(c, ci);
    g.edges_.push_back({std::min(a, b), std::max(a, b)});
    g.edges_.push_back({std::min(b, c), std::max(b, c)});
    g.edges_.push_back({std::min(c, a), std::max(c, a)});
  }

  // CSR adjacency, neighbor lists sorted
  std::vector<std::int32_t> deg(g.vertices_.size(), 0);
  for (const auto& e : g.edges_) {
    ++deg[e[0]];
    ++deg[e[1]];
  }
  g.adj_offset_.assign(g.vertices_.size() + 1, 0);
  for (std::size_t v = 0; v < g.vertices_.size(); ++v)
    g.adj_offset_[v + 1] = g.adj_offset_[v] + deg[v];
  g.adj_.assign(g.adj_offset_.back(), -1);
  std::vector<std::int32_t> cursor(g.adj_offset_.begin(), g.adj_offset_.end() - 1);
  for (const auto& e : g.edges_) {
    g.adj_[cursor[e[0]]++] = e[1];
    g.adj_[cursor[e[1]]++] = e[0];
  }
  for (std::size_t v = 0; v < g.vertices_.size(); ++v)
    std::sort(g.adj_.begin() + g.adj_offset_[v], g.adj_.begin() + g.adj_offset_[v + 1]);

  return g;
}

ExactPoint GasketGraph::coordinates(VertexId v) const {
  return exact_point(vertices_[v]);
}

VertexId GasketGraph::find(const Address& a) const {
  if (a.level > level_) return -1;
  const Address scaled = a.level == level_ ? a : a.scaled_to(level_);
  auto it = index_.find(scaled);
  return it == index_.end() ? -1 : it->second;
}

VertexId GasketGraph::index_of(const Address& a) const {
  const VertexId v = find(a);
  if (v < 0)
    throw validation_error("address (" + std::to_string(a.i) + "," + std::to_string(a.j) +
                           ")@" + std::to_string(a.level) + " is not a vertex of this graph");
  return v;
}

LatticeCell GasketGraph::ancestor_cell(std::int32_t cell_index, int generations) const {
  // Ancestor of a leaf cell at side 2^generations: walk the subdivision tree
  // from the root following the leaf centroid, which is strictly interior and
  // makes the walk unambiguous. The centroid is tracked at 3x scale to stay
  // integral.
  const LatticeCell leaf = cell_geom_[cell_index];
  const std::int64_t pi3 = 3 * leaf.ai + 1;
  const std::int64_t pj3 = 3 * leaf.aj + 1;
  LatticeCell cur{0, 0, span()};
  const int steps = level_ - generations;  // descents from the root
  for (int t = 0; t < steps; ++t) {
    const std::int64_t h = cur.side / 2;
    const std::int64_t di3 = pi3 - 3 * cur.ai;
    const std::int64_t dj3 = pj3 - 3 * cur.aj;
    if (di3 + dj3 <= 3 * h) {
      cur.side = h;
    } else if (di3 >= 3 * h) {
      cur = LatticeCell{cur.ai + h, cur.aj, h};
    } else {
      cur = LatticeCell{cur.ai, cur.aj + h, h};
    }
  }
  return cur;
}

TriangleBlock GasketGraph::make_block(const LatticeCell& cell, int k) const {
  TriangleBlock b;
  b.level = level_;
  b.scale = k;
  b.cell = cell;
  b.corners = {index_.at(Address{cell.ai, cell.aj, level_}),
               index_.at(Address{cell.ai + cell.side, cell.aj, level_}),
               index_.at(Address{cell.ai, cell.aj + cell.side, level_})};
  // members = anchor + V_k offsets (the block is an affine copy of the level-k gasket)
  std::vector<std::array<std::int64_t, 2>> offsets;
  if (k == 0) {
    offsets = {{0, 0}, {1, 0}, {0, 1}};
  } else {
    std::unordered_map<Address, VertexId, AddressHash> seen;
    for_each_cell(0, 0, std::int64_t{1} << k, [&](std::int64_t ai, std::int64_t aj) {
      for (auto [di, dj] : {std::array<std::int64_t, 2>{0, 0}, {1, 0}, {0, 1}}) {
        Address a{ai + di, aj + dj, k};
        if (seen.emplace(a, 0).second) offsets.push_back({a.i, a.j});
      }
    });
  }
  b.members.reserve(offsets.size());
  for (const auto& [oi, oj] : offsets)
    b.members.push_back(index_.at(Address{cell.ai + oi, cell.aj + oj, level_}));
  std::sort(b.members.begin(), b.members.end());
  return b;
}

TriangleBlock GasketGraph::block_of(VertexId v, int k) const {
  if (k < 0 || k > level_) throw validation_error("block scale k must satisfy 0 <= k <= n");
  const auto& host_cells = vertex_cells_[v];
  LatticeCell best{};
  bool have = false;
  auto consider = [&](const LatticeCell& c) {
    if (!have) {
      best = c;
      have = true;
      return;
    }
    if (c.ai == best.ai && c.aj == best.aj) return;
    // lexicographic (x, y) comparison of corner centroids, exact in integers:
    // x ~ 2*sum(i) + sum(j), y ~ sum(j)
    const auto key = [](const LatticeCell& t) {
      const std::int64_t si = 3 * t.ai + t.side;
      const std::int64_t sj = 3 * t.aj + t.side;
      return std::array<std::int64_t, 2>{2 * si + sj, sj};
    };
    if (key(c) > key(best)) best = c;
  };
  for (const std::int32_t ci : host_cells) {
    if (ci < 0) continue;
    consider(k == 0 ? cell_geom_[ci] : ancestor_cell(ci, k));
  }
  TriangleBlock b = make_block(best, k);
  return b;
}

std::vector<TriangleBlock> GasketGraph::enumerate_blocks(int k) const {
  if (k < 0 || k > level_) throw validation_error("block scale k must satisfy 0 <= k <= n");
  std::vector<TriangleBlock> out;
  const std::int64_t side = std::int64_t{1} << k;
  std::vector<LatticeCell> coarse;
  // cells of the level-(n-k) subdivision, in level-n lattice units
  struct Rec {
    std::int64_t ai, aj, side;
  };
  std::vector<Rec> stack{{0, 0, span()}};
  while (!stack.empty()) {
    Rec r = stack.back();
    stack.pop_back();
    if (r.side == side) {
      coarse.push_back(LatticeCell{r.ai, r.aj, r.side});
      continue;
    }
    const std::int64_t h = r.side / 2;
    stack.push_back({r.ai, r.aj + h, h});
    stack.push_back({r.ai + h, r.aj, h});
    stack.push_back({r.ai, r.aj, h});
  }
  out.reserve(coarse.size());
  for (const auto& c : coarse) out.push_back(make_block(c, k));
  return out;
}

} // namespace gasket
