#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gasket {

// Deterministic RNG used by every stochastic component. All variate
// transformations are spelled out here instead of using std::*_distribution,
// whose output is implementation-defined; this keeps runs bit-reproducible
// across standard libraries.
class Rng {
public:
  static constexpr const char* kAlgorithmId = "mt19937_64";

  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform in [0, 1] avoiding an exact 0 (safe as a log argument).
  double u01_open() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Exponential holding time with the given total rate.
  double exponential(double rate) { return -std::log(u01_open()) / rate; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // multiply-shift; bias is negligible for the small n used here
    return static_cast<std::uint64_t>(u01() * static_cast<double>(n)) % n;
  }

  // Standard normal via Box-Muller.
  double normal() {
    double u = u01_open();
    double v = u01_open();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * v);
  }

private:
  std::mt19937_64 eng_;
};

// splitmix64 finalizer; derives independent stream seeds from (seed, salt)
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace gasket

