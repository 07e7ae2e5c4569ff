#include "wgqed/imperfect.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wgqed/analytic.hpp"
#include "wgqed/dynamics.hpp"
#include "wgqed/fft.hpp"
#include "wgqed/simd.hpp"

namespace wgqed::imperfect {

namespace {

// Far enough out that the kernel size changes without visible steps as sigma varies.
constexpr double kKernelReach = 8.0;
constexpr double kMassTolerance = 1e-6;
constexpr double kSpanMass = 0.999;

std::size_t half_width(double sigma, double step) {
  if (sigma <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(kKernelReach * sigma / step));
}

void warn_coarse(double sigma, double step, Warnings* warnings) {
  if (warnings && sigma > 0.0 && sigma < 2.0 * step) {
    std::ostringstream os;
    os << "grid too coarse: IRF width " << sigma << " ns is below twice the delay spacing " << step << " ns";
    warnings->push_back(os.str());
  }
}

// Delays below a one-sided grid are the mirror image for tt and rr.
std::vector<double> pad_mirror_left(std::span<const double> v, std::size_t k) {
  if (v.size() <= k) throw SpanError("irf_convolve: one-sided trace shorter than the response kernel");
  std::vector<double> out;
  out.reserve(v.size() + 2 * k);
  for (std::size_t i = k; i >= 1; --i) out.push_back(v[i]);
  out.insert(out.end(), v.begin(), v.end());
  out.insert(out.end(), k, v.back());
  return out;
}

std::vector<double> pad_replicate(std::span<const double> v, std::size_t k) {
  std::vector<double> out;
  out.reserve(v.size() + 2 * k);
  out.insert(out.end(), k, v.front());
  out.insert(out.end(), v.begin(), v.end());
  out.insert(out.end(), k, v.back());
  return out;
}

UniformGrid extend(const UniformGrid& g, std::size_t k) {
  return {g.lo - g.step * static_cast<double>(k), g.step, g.n + 2 * k};
}

}  // namespace

std::vector<double> spectral_average_intensity(const std::function<double(double)>& intensity, double sigma,
                                               std::span<const double> omegas, std::size_t order) {
  const GaussianRule rule = gaussian_rule(sigma, order);
  std::vector<double> out(omegas.size(), 0.0);
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < rule.offsets.size(); ++j) acc += rule.weights[j] * intensity(omegas[i] - rule.offsets[j]);
    out[i] = acc;
  }
  return out;
}

std::vector<double> spectral_average_intensity(std::span<const double> samples, const UniformGrid& grid,
                                               double sigma) {
  if (samples.size() != grid.size()) throw ArgumentError("spectral_average_intensity: samples do not match grid");
  if (sigma < 0.0) throw ArgumentError("spectral_average_intensity: negative sigma");
  if (sigma == 0.0) return {samples.begin(), samples.end()};
  const double covered = std::erf(grid.span() / (2.0 * std::numbers::sqrt2 * sigma));
  if (covered < kSpanMass) {
    std::ostringstream os;
    os << "spectral_average_intensity: grid span " << grid.span() << " holds only " << covered
       << " of the Gaussian mass (sigma " << sigma << ")";
    throw SpanError(os.str());
  }
  const auto kernel = gaussian_kernel(sigma, grid.step);
  const auto padded = pad_replicate(samples, kernel.size() / 2);
  return convolve_valid(padded, kernel);
}

AveragedCorrelation spectral_average_g2_parts(const CorrelationModel& g2, const IntensityModel& i_mu,
                                              const IntensityModel& i_nu, double sigma, double omega,
                                              std::span<const double> taus, std::size_t order) {
  const GaussianRule rule = gaussian_rule(sigma, order);
  AveragedCorrelation out;
  out.numerator.assign(taus.size(), 0.0);
  for (std::size_t j = 0; j < rule.offsets.size(); ++j) {
    const double w = omega - rule.offsets[j];
    const auto g = g2(w, taus);
    for (std::size_t i = 0; i < taus.size(); ++i) out.numerator[i] += rule.weights[j] * g[i];
    out.denominator += rule.weights[j] * i_mu(w) * i_nu(w);
  }
  return out;
}

std::vector<double> spectral_average_g2(const CorrelationModel& g2, const IntensityModel& i_mu,
                                        const IntensityModel& i_nu, double sigma, double omega,
                                        std::span<const double> taus, std::size_t order) {
  auto parts = spectral_average_g2_parts(g2, i_mu, i_nu, sigma, omega, taus, order);
  if (!(std::abs(parts.denominator) > 0.0))
    throw DegenerateError("spectral_average_g2: averaged intensity product vanishes");
  for (double& v : parts.numerator) v /= parts.denominator;
  return std::move(parts.numerator);
}

std::vector<double> gaussian_kernel(double sigma, double step) {
  if (!(step > 0.0)) throw ArgumentError("gaussian_kernel: step must be positive");
  if (sigma < 0.0) throw ArgumentError("gaussian_kernel: negative sigma");
  if (sigma == 0.0) return {1.0};
  const std::size_t k = half_width(sigma, step);
  std::vector<double> w(2 * k + 1);
  const double norm = step / (sigma * std::sqrt(2.0 * std::numbers::pi));
  double mass = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double x = (static_cast<double>(i) - static_cast<double>(k)) * step / sigma;
    w[i] = norm * std::exp(-0.5 * x * x);
    mass += w[i];
  }
  if (std::abs(mass - 1.0) > kMassTolerance) {
    std::ostringstream os;
    os << "gaussian_kernel: width " << sigma << " is not resolved by spacing " << step << " (discrete mass " << mass
       << ")";
    throw SpanError(os.str());
  }
  for (double& v : w) v /= mass;
  return w;
}

std::vector<double> convolve_valid(std::span<const double> extended, std::span<const double> kernel,
                                   ConvolutionMethod method) {
  if (kernel.empty() || extended.size() < kernel.size())
    throw ArgumentError("convolve_valid: signal shorter than kernel");
  const std::size_t m = kernel.size();
  const std::size_t n = extended.size() - m + 1;
  if (m == 1) {
    std::vector<double> out(extended.begin(), extended.end());
    for (double& v : out) v *= kernel[0];
    return out;
  }
  if (method == ConvolutionMethod::fft) {
    const auto full = fft::convolve(extended, kernel);
    return {full.begin() + static_cast<std::ptrdiff_t>(m - 1), full.begin() + static_cast<std::ptrdiff_t>(m - 1 + n)};
  }
  std::vector<double> reversed(kernel.rbegin(), kernel.rend());
  std::vector<double> out(n);
  simd::correlate(extended, reversed, out);
  return out;
}

std::vector<double> irf_convolve(std::span<const double> values, double step, double sigma,
                                 ConvolutionMethod method, Warnings* warnings) {
  if (values.empty()) return {};
  if (sigma < 0.0) throw ArgumentError("irf_convolve: negative IRF width");
  if (sigma == 0.0) return {values.begin(), values.end()};
  warn_coarse(sigma, step, warnings);
  const auto kernel = gaussian_kernel(sigma, step);
  return convolve_valid(pad_replicate(values, kernel.size() / 2), kernel, method);
}

CorrelationTrace irf_convolve(const CorrelationTrace& trace, double sigma, ConvolutionMethod method,
                              Warnings* warnings) {
  const bool mirror = trace.tau.starts_at_zero() && (trace.pair == PortPair::tt || trace.pair == PortPair::rr);
  std::vector<double> v;
  if (mirror && sigma > 0.0) {
    warn_coarse(sigma, trace.tau.step, warnings);
    const auto kernel = gaussian_kernel(sigma, trace.tau.step);
    v = convolve_valid(pad_mirror_left(trace.values, kernel.size() / 2), kernel, method);
  } else {
    v = irf_convolve(trace.values, trace.tau.step, sigma, method, warnings);
  }
  for (double& x : v) x = std::max(x, 0.0);
  return CorrelationTrace(trace.pair, trace.tau, std::move(v));
}

std::vector<double> background_mix(std::span<const double> g2_unnormalized, double intensity_product,
                                   double background) {
  if (!(background >= 0.0 && background <= 1.0))
    throw DomainError("background_mix: background fraction must be in [0, 1]");
  const double den = (1.0 - background) * intensity_product + background;
  if (!(den > 0.0)) throw DegenerateError("background_mix: normalisation vanishes");
  std::vector<double> out(g2_unnormalized.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ((1.0 - background) * g2_unnormalized[i] + background) / den;
  return out;
}

double averaged_intensity(Port mu, double omega, cplx rabi, const EmitterParams& params, double sigma_short,
                          std::size_t order) {
  const GaussianRule rule = gaussian_rule(sigma_short, order);
  double acc = 0.0;
  for (std::size_t j = 0; j < rule.offsets.size(); ++j)
    acc += rule.weights[j] * dynamics::intensity_full(mu, omega - rule.offsets[j], rabi, params);
  return acc;
}

std::vector<double> averaged_intensity_scan(Port mu, const UniformGrid& omegas, cplx rabi,
                                            const EmitterParams& params, double sigma_short, std::size_t order) {
  // Narrow widths are resolved on a grid refined by an integer factor.
  std::size_t refine = 1;
  if (sigma_short > 0.0 && sigma_short < 2.0 * omegas.step)
    refine = static_cast<std::size_t>(std::ceil(2.0 * omegas.step / sigma_short));
  if (refine > kMaxRefinement || omegas.size() < 2) {
    std::vector<double> out(omegas.size());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = averaged_intensity(mu, omegas[i], rabi, params, sigma_short, order);
    return out;
  }
  const UniformGrid fine = make_grid(omegas.lo, omegas.hi(), (omegas.size() - 1) * refine + 1);
  const auto kernel = gaussian_kernel(sigma_short, fine.step);
  const UniformGrid ext = extend(fine, kernel.size() / 2);
  std::vector<double> exact(ext.size());
  for (std::size_t i = 0; i < ext.size(); ++i) exact[i] = dynamics::intensity_full(mu, ext[i], rabi, params);
  const auto smooth = convolve_valid(exact, kernel);
  std::vector<double> out(omegas.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = smooth[i * refine];
  return out;
}

CorrelationTrace imperfect_g2(PortPair pair, double omega, cplx rabi, const UniformGrid& tau_grid,
                              const EmitterParams& params, const NoiseModel& noise, const ModelOptions& options) {
  const double sigma_sd = options.layers.spectral_diffusion ? noise.sigma_long : 0.0;
  const double sigma_irf = options.layers.irf ? noise.sigma_irf : 0.0;
  const double bg = options.layers.background ? noise.background_for(pair) : 0.0;

  warn_coarse(sigma_irf, tau_grid.step, options.warnings);
  const auto kernel = gaussian_kernel(sigma_irf, tau_grid.step);
  const UniformGrid ext = extend(tau_grid, kernel.size() / 2);
  const auto taus = ext.values();

  // Spectral diffusion: average numerator and denominator separately.
  const GaussianRule rule = gaussian_rule(sigma_sd, options.gh_order);
  std::vector<double> num(taus.size(), 0.0);
  double den = 0.0;
  for (std::size_t j = 0; j < rule.offsets.size(); ++j) {
    const dynamics::EmitterResponse resp(omega - rule.offsets[j], rabi, params);
    const auto g = resp.g2_unnormalized(pair, taus);
    for (std::size_t i = 0; i < taus.size(); ++i) num[i] += rule.weights[j] * g[i];
    den += rule.weights[j] * resp.intensity(first_port(pair)) * resp.intensity(second_port(pair));
  }
  if (!(den > 0.0)) throw DegenerateError("imperfect_g2: averaged intensity product vanishes");

  std::vector<double> out;
  if (options.order == LayerOrder::sd_background_irf) {
    out = convolve_valid(background_mix(num, den, bg), kernel);
  } else {
    for (double& v : num) v /= den;
    auto smeared = convolve_valid(num, kernel);
    for (double& v : smeared) v *= den;
    out = background_mix(smeared, den, bg);
  }
  for (double& v : out) v = std::max(v, 0.0);
  return CorrelationTrace(pair, tau_grid, std::move(out));
}

std::vector<cplx> predicted_tbar(double omega, const UniformGrid& tau_grid, const EmitterParams& params,
                                 const NoiseModel& noise, std::size_t order) {
  const auto kernel = gaussian_kernel(noise.sigma_irf, tau_grid.step);
  const UniformGrid ext = extend(tau_grid, kernel.size() / 2);
  const GaussianRule rule = gaussian_rule(noise.sigma_long, order);
  std::vector<double> re(ext.size(), 0.0), im(ext.size(), 0.0);
  for (std::size_t j = 0; j < rule.offsets.size(); ++j) {
    for (std::size_t i = 0; i < ext.size(); ++i) {
      const cplx t = analytic::tau_kernel(omega - rule.offsets[j], ext[i], params);
      re[i] += rule.weights[j] * t.real();
      im[i] += rule.weights[j] * t.imag();
    }
  }
  const auto cr = convolve_valid(re, kernel);
  const auto ci = convolve_valid(im, kernel);
  std::vector<cplx> out(cr.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {cr[i], ci[i]};
  return out;
}

}  // namespace wgqed::imperfect
