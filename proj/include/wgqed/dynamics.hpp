#pragma once

// Finite-drive model of the emitter: Lindblad master equation, steady state,
// quantum-regression two-time correlators, and the output intensity and
// second-order correlation built from them through input-output relations.
//
// Operators act on the basis {|g>, |e>} (index 0, 1). Density matrices are
// vectorised column-major, vec(rho)[i + 2j] = rho(i, j).

#include <Eigen/Core>
#include <span>
#include <vector>

#include "wgqed/core.hpp"

namespace wgqed::dynamics {

using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

struct DensityMatrix {
  Mat2 rho = Mat2::Zero();

  /// <sigma^-> = Tr{sigma^- rho} = rho(e, g).
  cplx coherence() const { return rho(1, 0); }
  double excited_population() const { return rho(1, 1).real(); }
  Vec4 vectorised() const;
  static DensityMatrix from_vector(const Vec4& v);
};

/// Generator of the driven, damped, dephased two-level emitter:
/// H = -(w - w0) s+s- + i(Omega s+ - Omega* s-), dissipators
/// gamma_tot D[s-] + 2 gamma_d D[s+s-].
struct Liouvillian {
  Mat4 matrix = Mat4::Zero();
  DriveSpec drive;
  EmitterParams params;

  Vec4 apply(const Vec4& v) const { return matrix * v; }
  /// max_X |Tr L[X]| over the four basis operators.
  double trace_defect() const;
};

Liouvillian build_liouvillian(double omega, cplx rabi, const EmitterParams& params);

/// Null vector of L normalised to unit trace. Throws SingularityError when the
/// null space is not one-dimensional.
DensityMatrix steady_state(const Liouvillian& L);

/// exp(L tau) through eigendecomposition of L, with a scaling-and-squaring
/// fallback when the eigenbasis is ill-conditioned.
class Propagator {
 public:
  explicit Propagator(const Mat4& generator);

  Vec4 apply(double tau, const Vec4& v) const;
  /// Tr{A exp(L tau)[X]} for every tau; X given vectorised.
  std::vector<cplx> traced(const Mat2& A, const Vec4& x, std::span<const double> taus) const;
  bool uses_eigenbasis() const { return eigen_ok_; }

 private:
  Mat4 generator_;
  Mat4 vectors_;
  Mat4 inverse_;
  Eigen::Vector4cd values_;
  bool eigen_ok_ = false;
};

enum class CorrelatorKind {
  lower_lower,         // <s-(t+tau) s-(t)>
  raise_lower,         // <s+(t+tau) s-(t)>
  raise_lower_lower,   // <s+(t) s-(t+tau) s-(t)>
  number_lower,        // <s+(t+tau) s-(t+tau) s-(t)>
  raise_number_lower,  // <s+(t) s+(t+tau) s-(t+tau) s-(t)>
};

/// Stationary two-time correlator Tr{A exp(L tau)[B rho C]} for tau >= 0.
std::vector<cplx> regression_correlator(CorrelatorKind kind, std::span<const double> taus,
                                        const Liouvillian& L, const DensityMatrix& rho_ss);

/// Steady-state response at one drive frequency and strength; shares the
/// Liouvillian, steady state and propagator between observables.
class EmitterResponse {
 public:
  EmitterResponse(double omega, cplx rabi, const EmitterParams& params);

  const Liouvillian& liouvillian() const { return L_; }
  const DensityMatrix& steady() const { return rho_; }
  /// <s->_ss / Omega.
  cplx coherence_ratio() const;
  /// Normalised output intensity of a port (1 off resonance in t).
  double intensity(Port mu) const;
  /// Unnormalised G2 of a port pair at arbitrary delays; negative delays use
  /// G2_{mu mu'}(-tau) = G2_{mu' mu}(tau).
  std::vector<double> g2_unnormalized(PortPair pair, std::span<const double> taus) const;
  std::vector<cplx> correlator(CorrelatorKind kind, std::span<const double> taus) const;

 private:
  std::vector<double> g2_nonnegative(Port mu, Port nu, std::span<const double> taus) const;

  EmitterParams params_;
  cplx rabi_;
  Liouvillian L_;
  DensityMatrix rho_;
  Propagator prop_;
};

/// Exact intensity at any drive power. Throws ArgumentError for Omega = 0.
double intensity_full(Port mu, double omega, cplx rabi, const EmitterParams& params);

/// Exact g2 of a port pair on a delay grid (one-sided from 0 or symmetric).
CorrelationTrace g2_full(PortPair pair, double omega, cplx rabi, const UniformGrid& tau_grid,
                         const EmitterParams& params);

}  // namespace wgqed::dynamics
