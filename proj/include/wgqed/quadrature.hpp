#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wgqed {

/// Physicists' Gauss-Hermite rule: int exp(-x^2) f(x) dx ~ sum w_i f(x_i).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Golub-Welsch construction; results are cached per order.
const GaussHermiteRule& gauss_hermite(std::size_t order);

/// Rule for averaging against a zero-mean normal density of std `sigma`:
/// int P(d; sigma) f(d) dd ~ sum weights[i] f(offsets[i]). Weights sum to 1.
/// sigma = 0 degenerates to the single node {0} with weight 1.
struct GaussianRule {
  std::vector<double> offsets;
  std::vector<double> weights;
};

inline constexpr std::size_t kDefaultGaussHermiteOrder = 61;

GaussianRule gaussian_rule(double sigma, std::size_t order = kDefaultGaussHermiteOrder);

/// Trapezoid weights for a uniform grid of n points and spacing h.
std::vector<double> trapezoid_weights(std::size_t n, double h);

}  // namespace wgqed
