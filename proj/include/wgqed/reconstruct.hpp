#pragma once

// Inverse pipeline: dispersion-relation completion of measured real parts,
// single-photon coefficients from a transmission scan, the real part of the
// two-photon kernel from three g2 traces, and the Fourier inversion to the
// energy-conserving two-photon sector.

#include <span>
#include <vector>

#include "wgqed/core.hpp"

namespace wgqed::reconstruct {

// ---------------------------------------------------------------------------
// Kramers-Kronig
// ---------------------------------------------------------------------------

enum class HilbertMethod {
  fft,         // sign-kernel multiplication on a zero-padded FFT
  odd_offset,  // principal value on the interleaved sublattice
};

struct KKOptions {
  HilbertMethod method = HilbertMethod::fft;
  bool tail_correction = true;   // add c1/y + c2/y^2 tails fitted to the outer 10%
  double edge_tolerance = 0.05;  // |edge| must stay below this fraction of max|input|
};

/// H[u](x) = (1/pi) P int u(y) / (x - y) dy, i.e. Im f from Re f for a
/// response analytic in the upper half plane. Throws SpanError when the input
/// has not decayed at the grid edges.
std::vector<double> kramers_kronig(std::span<const double> re, const UniformGrid& grid,
                                   const KKOptions& options = {});

// ---------------------------------------------------------------------------
// Single-photon coefficients
// ---------------------------------------------------------------------------

struct SingleSpectra {
  ComplexSpectrum response;  // G
  ComplexSpectrum t;
  ComplexSpectrum r;
};

/// Inverts I_t = 1 + Re[R G] for G and maps it to t and r. beta and z must
/// come from a fit. Throws DegenerateError when R vanishes.
SingleSpectra reconstruct_single(std::span<const double> intensity_t, const UniformGrid& grid, double beta,
                                 cplx z, const KKOptions& options = {});

// ---------------------------------------------------------------------------
// Two-photon kernel
// ---------------------------------------------------------------------------

enum class Combination {
  exact,       // (g - 1)-weighted; equals Re T for traces of the weak-drive form
  as_printed,  // g-weighted; exceeds Re T by (|t|^2 - |r|^2)^2 / 2
};

/// Re T(tau) = (g_tt - 1)|t|^4/2 + (g_rr - 1)|r|^4/2 - (g_tr - 1)|t r|^2.
/// Throws ArgumentError when the traces do not share a delay grid.
std::vector<double> reconstruct_t_real(const CorrelationTrace& g_tt, const CorrelationTrace& g_rr,
                                       const CorrelationTrace& g_tr, cplx t, cplx r,
                                       Combination combination = Combination::exact);

/// Same combination from unnormalised numerators N = g |chi chi'|^2, which
/// stay finite where a port amplitude vanishes.
std::vector<double> reconstruct_t_real_numerators(std::span<const double> n_tt, std::span<const double> n_rr,
                                                  std::span<const double> n_tr, cplx t, cplx r,
                                                  Combination combination = Combination::exact);

/// T(w, tau) sampled on an (omega x tau) grid, omega-major.
struct TField {
  UniformGrid omega;
  UniformGrid tau;
  std::vector<cplx> values;

  cplx at(std::size_t i_omega, std::size_t i_tau) const { return values[i_omega * tau.size() + i_tau]; }
  std::vector<cplx> row(std::size_t i_omega) const;
};

/// Completes Re T(w, tau) (omega-major, same layout as TField) by a KK
/// transform over omega at every delay.
TField complete_t(std::span<const double> re_t, const UniformGrid& omega, const UniformGrid& tau,
                  const KKOptions& options = {});

/// Relative decay required at the ends of the delay grid before inversion.
inline constexpr double kTauDecayTolerance = 1e-4;

/// T_{w-D, w+D, w, w} = (1/pi) int dtau exp(i D tau) T(w, tau), trapezoid on
/// the delay grid (a grid starting at 0 is mirrored using T(-tau) = T(tau)).
/// Throws SpanError when |T| at the grid ends exceeds 1e-4 of its peak.
TwoPhotonSector invert_to_sector(double omega, std::span<const cplx> t_tau, const UniformGrid& tau,
                                 const UniformGrid& delta);

}  // namespace wgqed::reconstruct
