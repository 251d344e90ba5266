#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Deterministic value generator for tests.
struct TestRng {
  explicit TestRng(std::uint64_t seed) : eng(seed) {}

  double uniform01() { return double(eng() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  std::int64_t index(std::int64_t n) { return std::int64_t(eng() % std::uint64_t(n)); }

  double gauss() {
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  std::mt19937_64 eng;
};
