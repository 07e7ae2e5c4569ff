#pragma once

// Weighted least-squares extraction of emitter and noise parameters from
// intensity scans and g2 traces, with gamma_tot held at its measured value.

#include <Eigen/Core>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wgqed/core.hpp"
#include "wgqed/quadrature.hpp"

namespace wgqed::fit {

enum class Param : std::size_t { beta, gamma_d, xi, eta, sigma_short, sigma_long, background_rr };
inline constexpr std::size_t kParamCount = 7;
inline constexpr std::array<Param, kParamCount> kAllParams = {Param::beta,        Param::gamma_d,    Param::xi,
                                                              Param::eta,         Param::sigma_short, Param::sigma_long,
                                                              Param::background_rr};

using ParamArray = std::array<double, kParamCount>;
using ParamMask = std::array<bool, kParamCount>;

std::string_view param_name(Param p);
std::optional<Param> parse_param(std::string_view name);
inline std::size_t index(Param p) { return static_cast<std::size_t>(p); }

/// Everything the forward model needs. The drive of a measurement at laser
/// power P is Omega = sqrt(eta P) with eta in ns^-2 / uW.
struct ModelParams {
  EmitterParams emitter;
  NoiseModel noise;
  double eta = 0.1;

  ParamArray to_array() const;
  /// Copy of *this with the seven fitted quantities replaced.
  ModelParams with(const ParamArray& values) const;
  cplx rabi(double power_uw) const;
};

enum class Weighting { poisson, uniform };

struct FitConfig {
  ModelParams start;  // initial values of free parameters, fixed values of the rest
  ParamMask free = {true, true, true, true, true, true, true};
  ParamArray lower = {0.0, 0.0, -5.0, 1e-6, 0.0, 0.0, 0.0};
  ParamArray upper = {1.0, 50.0, 5.0, 1e3, 20.0, 20.0, 0.99};
  double gradient_tolerance = 1e-8;
  double step_tolerance = 1e-8;
  int max_iterations = 200;
  Weighting weighting = Weighting::poisson;
  int restarts = 0;
  std::size_t gh_order = kDefaultGaussHermiteOrder;
  /// Profile-likelihood intervals for parameters that end on a bound; each
  /// costs a few dozen constrained refits.
  bool profile_at_bounds = true;
};

enum class FitStatus { converged, max_iterations, stalled };
std::string_view to_string(FitStatus s);

struct FitResult {
  ModelParams params;
  ParamMask free{};
  ParamArray estimate{};
  ParamArray ci_low{};
  ParamArray ci_high{};
  ParamArray std_error{};
  ParamMask at_bound{};
  ParamMask profile_ci{};
  Eigen::MatrixXd covariance;  // free parameters only, in mask order
  double chi2 = 0.0;
  double residual_norm = 0.0;
  std::size_t points = 0;
  std::size_t dof = 0;
  int iterations = 0;
  FitStatus status = FitStatus::converged;
  std::vector<std::string> warnings;

  bool converged() const { return status == FitStatus::converged; }
  double reduced_chi2() const { return dof > 0 ? chi2 / static_cast<double>(dof) : 0.0; }
};

/// Concatenated (model - data) / sigma over all intensity points, then all g2
/// points. Poisson weighting uses sigma = sqrt(counts) / scale with the
/// counts-per-unit scale of each scan or trace; without counts every point
/// gets unit sigma.
std::vector<double> model_residuals(const MeasurementSet& data, const ModelParams& params,
                                    Weighting weighting = Weighting::poisson,
                                    std::size_t gh_order = kDefaultGaussHermiteOrder);

/// Model values in the same layout as model_residuals, unweighted.
std::vector<double> model_values(const MeasurementSet& data, const ModelParams& params,
                                 std::size_t gh_order = kDefaultGaussHermiteOrder);

/// Central-difference Jacobian of the residuals at `params` with respect to the
/// parameters freed in `config` (columns in mask order); one-sided
/// second-order differences next to a bound.
Eigen::MatrixXd residual_jacobian(const MeasurementSet& data, const ModelParams& params, const FitConfig& config);

/// Levenberg-Marquardt with box projection. Throws IdentifiabilityError when
/// the free parameters cannot be determined from the data.
FitResult fit(const MeasurementSet& data, const FitConfig& config);

struct SaturationPoint {
  double power_uw = 0.0;
  double saturation = 0.0;  // n = 2 Omega^2 / gamma_tot^2
  double intensity = 0.0;   // spectrally averaged I_t at the emitter line
};

std::vector<SaturationPoint> saturation_curve(std::span<const double> powers_uw, const ModelParams& params);

}  // namespace wgqed::fit
