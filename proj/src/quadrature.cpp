#include "wgqed/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "wgqed/core.hpp"

namespace wgqed {

namespace {

GaussHermiteRule build_gauss_hermite(std::size_t order) {
  // Jacobi matrix of the Hermite recurrence: off-diagonal sqrt(k/2).
  const auto n = static_cast<Eigen::Index>(order);
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) {
    const double b = std::sqrt(0.5 * static_cast<double>(k));
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussHermiteRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double mu0 = std::sqrt(std::numbers::pi);
  for (Eigen::Index i = 0; i < n; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
  }
  // Symmetrise: the exact rule is even.
  for (std::size_t i = 0; i < order / 2; ++i) {
    const std::size_t j = order - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(std::size_t order) {
  if (order == 0) throw ArgumentError("Gauss-Hermite order must be positive");
  static std::mutex mutex;
  static std::map<std::size_t, GaussHermiteRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_gauss_hermite(order)).first;
  return it->second;
}

GaussianRule gaussian_rule(double sigma, std::size_t order) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ArgumentError("Gaussian width must be finite and >= 0");
  GaussianRule out;
  if (sigma == 0.0) {
    out.offsets = {0.0};
    out.weights = {1.0};
    return out;
  }
  const auto& gh = gauss_hermite(order);
  out.offsets.resize(order);
  out.weights.resize(order);
  const double scale = std::numbers::sqrt2 * sigma;
  double total = 0.0;
  for (std::size_t i = 0; i < order; ++i) {
    out.offsets[i] = scale * gh.nodes[i];
    out.weights[i] = gh.weights[i] / std::sqrt(std::numbers::pi);
    total += out.weights[i];
  }
  if (std::abs(total - 1.0) > 1e-6) throw SpanError("Gauss-Hermite weights lost unit mass");
  return out;
}

std::vector<double> trapezoid_weights(std::size_t n, double h) {
  std::vector<double> w(n, h);
  if (n >= 1) {
    w.front() *= 0.5;
    w.back() *= 0.5;
  }
  if (n == 1) w[0] = 0.0;
  return w;
}

}  // namespace wgqed
