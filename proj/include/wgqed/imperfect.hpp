#pragma once

// Measurement-chain corruption: Gaussian spectral diffusion of the emitter
// line, Gaussian detector response in delay, and laser background mixing.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wgqed/core.hpp"
#include "wgqed/quadrature.hpp"

namespace wgqed::imperfect {

using Warnings = std::vector<std::string>;

// ---------------------------------------------------------------------------
// Spectral diffusion
// ---------------------------------------------------------------------------

/// I_bar(w) = int dD P(D; sigma) I(w - D), Gauss-Hermite quadrature.
std::vector<double> spectral_average_intensity(const std::function<double(double)>& intensity, double sigma,
                                               std::span<const double> omegas,
                                               std::size_t order = kDefaultGaussHermiteOrder);

/// Same average for a spectrum that is only known on a uniform grid; the
/// Gaussian is discretised on the grid spacing and the spectrum is extended by
/// its edge values. Throws SpanError when less than 0.999 of the Gaussian mass
/// fits inside the grid span or the discretised kernel misses unit mass.
std::vector<double> spectral_average_intensity(std::span<const double> samples, const UniformGrid& grid,
                                               double sigma);

/// Numerator and denominator of the averaged g2, kept apart so that
/// background mixing can act on the unnormalised correlation.
struct AveragedCorrelation {
  std::vector<double> numerator;  // <G2(w - D, tau)>_D
  double denominator = 0.0;       // <I_mu I_mu'(w - D)>_D
};

using CorrelationModel = std::function<std::vector<double>(double omega, std::span<const double> taus)>;
using IntensityModel = std::function<double(double omega)>;

AveragedCorrelation spectral_average_g2_parts(const CorrelationModel& g2, const IntensityModel& i_mu,
                                              const IntensityModel& i_nu, double sigma, double omega,
                                              std::span<const double> taus,
                                              std::size_t order = kDefaultGaussHermiteOrder);

/// g2_bar(w, tau) = <G2>_D / <I_mu I_mu'>_D. Throws DegenerateError on a zero
/// denominator.
std::vector<double> spectral_average_g2(const CorrelationModel& g2, const IntensityModel& i_mu,
                                        const IntensityModel& i_nu, double sigma, double omega,
                                        std::span<const double> taus,
                                        std::size_t order = kDefaultGaussHermiteOrder);

// ---------------------------------------------------------------------------
// Instrument response
// ---------------------------------------------------------------------------

enum class ConvolutionMethod { fft, direct };

/// Unit-mass discrete Gaussian sampled at multiples of `step` out to 8 sigma.
/// Throws SpanError when the raw discretised mass is off unity by more than 1e-6.
std::vector<double> gaussian_kernel(double sigma, double step);

/// Convolution of `values` (uniform spacing `step`) with the detector
/// response; edges are padded by replicating the end samples over the kernel
/// half-width (8 sigma).
std::vector<double> irf_convolve(std::span<const double> values, double step, double sigma,
                                 ConvolutionMethod method = ConvolutionMethod::fft, Warnings* warnings = nullptr);

/// One-sided tt and rr traces are padded below tau = 0 by their mirror image.
CorrelationTrace irf_convolve(const CorrelationTrace& trace, double sigma,
                              ConvolutionMethod method = ConvolutionMethod::fft, Warnings* warnings = nullptr);

/// Convolution without padding: `extended` carries kernel_half_width extra
/// samples on each side and the result has extended.size() - 2*half samples.
std::vector<double> convolve_valid(std::span<const double> extended, std::span<const double> kernel,
                                   ConvolutionMethod method = ConvolutionMethod::fft);

// ---------------------------------------------------------------------------
// Background
// ---------------------------------------------------------------------------

/// g2_hat = ((1 - B) G2 + B) / ((1 - B) I_mu I_mu' + B).
std::vector<double> background_mix(std::span<const double> g2_unnormalized, double intensity_product,
                                   double background);

// ---------------------------------------------------------------------------
// Composite forward models
// ---------------------------------------------------------------------------

struct Layers {
  bool spectral_diffusion = true;
  bool background = true;
  bool irf = true;
};

enum class LayerOrder { sd_background_irf, sd_irf_background };

struct ModelOptions {
  Layers layers;
  LayerOrder order = LayerOrder::sd_background_irf;
  std::size_t gh_order = kDefaultGaussHermiteOrder;
  Warnings* warnings = nullptr;
};

/// Intensity including spectral diffusion with sigma_short.
double averaged_intensity(Port mu, double omega, cplx rabi, const EmitterParams& params, double sigma_short,
                          std::size_t order = kDefaultGaussHermiteOrder);

/// Largest grid refinement used by averaged_intensity_scan before it falls
/// back to Gauss-Hermite per point.
inline constexpr std::size_t kMaxRefinement = 32;

/// Intensity scan over a uniform detuning grid. The exact intensity is
/// evaluated on the grid extended by the kernel half-width (refined so that
/// sigma spans at least two samples) and averaged with the discrete Gaussian.
std::vector<double> averaged_intensity_scan(Port mu, const UniformGrid& omegas, cplx rabi,
                                            const EmitterParams& params, double sigma_short,
                                            std::size_t order = kDefaultGaussHermiteOrder);

/// Finite-drive g2 of a port pair with the selected imperfection layers.
CorrelationTrace imperfect_g2(PortPair pair, double omega, cplx rabi, const UniformGrid& tau_grid,
                              const EmitterParams& params, const NoiseModel& noise,
                              const ModelOptions& options = {});

/// T_bar(w, tau) = int dD int dtau' P_SD(D) P_IRF(tau' - tau) T(w - D, tau').
std::vector<cplx> predicted_tbar(double omega, const UniformGrid& tau_grid, const EmitterParams& params,
                                 const NoiseModel& noise, std::size_t order = kDefaultGaussHermiteOrder);

}  // namespace wgqed::imperfect
