#pragma once

#include <cstdint>
#include <functional>

namespace gasket {

// Vertex address on the level-n triangular lattice. The pair (i, j) names the
// planar point (i*e1 + j*e2) / 2^n with e1 = (1, 0) and e2 = (1/2, sqrt(3)/2),
// so two vertices coincide iff their (i, j, level) agree. Integer addressing
// makes deduplication of points shared between small triangles exact.
struct Address {
  std::int64_t i = 0;
  std::int64_t j = 0;
  int level = 0;

  friend bool operator==(const Address&, const Address&) = default;

  // Same geometric point expressed on a finer lattice.
  Address scaled_to(int target_level) const {
    const std::int64_t f = std::int64_t{1} << (target_level - level);
    return Address{i * f, j * f, target_level};
  }
};

// Exact planar coordinates: x = x_num / 2^denom_log2,
// y = y_sqrt3_num * sqrt(3) / 2^denom_log2.
struct ExactPoint {
  std::int64_t x_num = 0;
  std::int64_t y_sqrt3_num = 0;
  int denom_log2 = 0;

  double x() const {
    return static_cast<double>(x_num) / static_cast<double>(std::int64_t{1} << denom_log2);
  }
  double y() const {
    return static_cast<double>(y_sqrt3_num) * 1.7320508075688772 /
           static_cast<double>(std::int64_t{1} << denom_log2);
  }
};

inline ExactPoint exact_point(const Address& a) {
  // (i*e1 + j*e2)/2^n = ((2i + j)/2^{n+1}, j*sqrt(3)/2^{n+1})
  return ExactPoint{2 * a.i + a.j, a.j, a.level + 1};
}

struct AddressHash {
  std::size_t operator()(const Address& a) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(a.i) * 0x9e3779b97f4a7c15ULL;
    h ^= static_cast<std::uint64_t>(a.j) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

} // namespace gasket
