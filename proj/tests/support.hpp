#pragma once

// Shared helpers for the test suites: a seeded generator of physical
// parameter draws and a few comparison utilities.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "wgqed/core.hpp"

namespace wgqed::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  /// Emitter draw spanning the physically sensible range.
  EmitterParams emitter() {
    EmitterParams p;
    p.beta = uniform(0.05, 0.99);
    p.gamma_tot = uniform(0.5, 12.0);
    p.gamma_d = coin() ? 0.0 : uniform(0.0, 0.5) * p.gamma_tot;
    p.xi = uniform(-0.5, 0.5);
    p.omega0 = uniform(-1.0, 1.0) * p.gamma_tot;
    return p;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline double rel(std::complex<double> a, std::complex<double> b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

/// Composite trapezoid of f over [a, b] with n intervals.
template <class F>
auto trapezoid(F&& f, double a, double b, std::size_t n) {
  const double h = (b - a) / static_cast<double>(n);
  auto acc = 0.5 * (f(a) + f(b));
  for (std::size_t i = 1; i < n; ++i) acc += f(a + h * static_cast<double>(i));
  return acc * h;
}

}  // namespace wgqed::testing
