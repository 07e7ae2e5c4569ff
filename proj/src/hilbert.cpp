#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "wgqed/fft.hpp"
#include "wgqed/reconstruct.hpp"
#include "wgqed/simd.hpp"

namespace wgqed::reconstruct {

namespace {

constexpr double kTailFraction = 0.1;

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

std::vector<double> hilbert_fft(std::span<const double> u) {
  const std::size_t n = u.size();
  const std::size_t m = next_pow2(4 * n);
  std::vector<cplx> buf(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) buf[i] = u[i];
  auto spec = fft::forward(buf);
  // -i sgn(k); DC and Nyquist carry no odd part.
  spec[0] = 0.0;
  spec[m / 2] = 0.0;
  for (std::size_t k = 1; k < m / 2; ++k) spec[k] *= cplx(0.0, -1.0);
  for (std::size_t k = m / 2 + 1; k < m; ++k) spec[k] *= cplx(0.0, 1.0);
  const auto back = fft::inverse(spec);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = back[i].real();
  return out;
}

// Maclaurin rule: (2/pi) sum over j with i - j odd of u_j / (i - j).
std::vector<double> hilbert_odd_offset(std::span<const double> u) {
  const std::size_t n = u.size();
  std::vector<double> signal(3 * n - 2, 0.0);
  std::copy(u.begin(), u.end(), signal.begin() + static_cast<std::ptrdiff_t>(n - 1));
  std::vector<double> kernel(2 * n - 1, 0.0);
  for (std::size_t k = 0; k < kernel.size(); ++k) {
    const auto d = static_cast<long long>(n) - 1 - static_cast<long long>(k);
    if (d % 2 != 0) kernel[k] = 2.0 / (std::numbers::pi * static_cast<double>(d));
  }
  std::vector<double> out(n);
  simd::correlate(signal, kernel, out);
  return out;
}

// Least-squares c1/y + c2/y^2 through samples [first, first + count), y from the centre.
std::pair<double, double> fit_tail(std::span<const double> u, const UniformGrid& grid, double centre,
                                   std::size_t first, std::size_t count) {
  Eigen::MatrixXd a(count, 2);
  Eigen::VectorXd b(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double y = grid[first + k] - centre;
    a(static_cast<Eigen::Index>(k), 0) = 1.0 / y;
    a(static_cast<Eigen::Index>(k), 1) = 1.0 / (y * y);
    b(static_cast<Eigen::Index>(k)) = u[first + k];
  }
  const Eigen::Vector2d c = a.colPivHouseholderQr().solve(b);
  return {c(0), c(1)};
}

// int_Y^inf dy (1/y) / (x - y) = log(1 - x/Y) / x.
double tail_i1(double x, double y0) {
  if (std::abs(x) < 1e-8 * y0) return -1.0 / y0 - x / (2.0 * y0 * y0);
  return std::log1p(-x / y0) / x;
}

// int_Y^inf dy (1/y^2) / (x - y) = (1/x)(1/Y + I1(x)).
double tail_i2(double x, double y0) {
  if (std::abs(x) < 1e-3 * y0) {
    const double q = x / y0;
    return -(1.0 / (2.0 * y0 * y0)) * (1.0 + q * (2.0 / 3.0) + q * q * 0.5);
  }
  return (1.0 / x) * (1.0 / y0 + tail_i1(x, y0));
}

void add_tails(std::span<const double> u, const UniformGrid& grid, std::span<double> out) {
  const std::size_t n = u.size();
  const auto count = std::max<std::size_t>(3, static_cast<std::size_t>(std::ceil(kTailFraction * n)));
  if (2 * count > n) return;
  const double centre = 0.5 * (grid.lo + grid.hi());
  const double y_right = grid.hi() + 0.5 * grid.step - centre;
  const double y_left = centre - (grid.lo - 0.5 * grid.step);
  const auto [c1, c2] = fit_tail(u, grid, centre, n - count, count);
  const auto [d1, d2] = fit_tail(u, grid, centre, 0, count);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid[i] - centre;
    const double right = c1 * tail_i1(x, y_right) + c2 * tail_i2(x, y_right);
    const double left = d1 * tail_i1(-x, y_left) - d2 * tail_i2(-x, y_left);
    out[i] += (right + left) / std::numbers::pi;
  }
}

}  // namespace

std::vector<double> kramers_kronig(std::span<const double> re, const UniformGrid& grid, const KKOptions& options) {
  if (re.size() != grid.size()) throw ArgumentError("kramers_kronig: values do not match grid");
  if (re.size() < 8) throw SpanError("kramers_kronig: need at least 8 samples");
  double peak = 0.0;
  for (double v : re) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return std::vector<double>(re.size(), 0.0);
  const double edge = std::max(std::abs(re.front()), std::abs(re.back()));
  if (edge >= options.edge_tolerance * peak) {
    std::ostringstream os;
    os << "kramers_kronig: input has not decayed at the grid edges (|edge| = " << edge << ", max = " << peak
       << ", span " << grid.lo << " .. " << grid.hi() << "); widen the scan";
    throw SpanError(os.str());
  }
  auto out = options.method == HilbertMethod::fft ? hilbert_fft(re) : hilbert_odd_offset(re);
  if (options.tail_correction) add_tails(re, grid, out);
  return out;
}

}  // namespace wgqed::reconstruct
