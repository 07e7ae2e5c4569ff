#pragma once

// Closed-form weak-drive scattering quantities of a two-level emitter in a
// waveguide, including white-noise dephasing and a constant Fano parameter.

#include <span>
#include <vector>

#include "wgqed/core.hpp"

namespace wgqed::analytic {

/// Single-photon transmission and reflection amplitudes; t = 1 + r always.
struct SingleCoeffs {
  cplx t;
  cplx r;

  cplx amplitude(Port mu) const { return mu == Port::t ? t : r; }
};

/// z = 1 / (1 + i xi).
cplx fano_z(double xi);

/// G(w) = (gamma_tot/2) / (gamma_tot/2 + gamma_d - i (w - w0)).
cplx dephasing_response(double omega, const EmitterParams& params);
std::vector<cplx> dephasing_response(std::span<const double> omegas, const EmitterParams& params);

SingleCoeffs single_coeffs(double omega, const EmitterParams& params);
/// t and r from a given response value G, so reconstructed G can be mapped back.
SingleCoeffs coeffs_from_response(cplx response, double beta, cplx z);

/// R = (beta / |z|^2)(beta - 2 z), the coefficient in I_t = 1 + Re[R G].
cplx intensity_coefficient(double beta, cplx z);

double weak_intensity_t(double omega, const EmitterParams& params);
std::vector<double> weak_intensity_t(std::span<const double> omegas, const EmitterParams& params);

/// Correlated two-photon kernel T_{nu1 nu2 om1 om2}.
cplx two_photon_T(double nu1, double nu2, double om1, double om2, const EmitterParams& params);

/// Energy-conserving sector T_{w-D, w+D, w, w} in closed form.
cplx sector_T(double omega, double delta, const EmitterParams& params);

/// Fourier-transformed kernel at delay tau; depends on tau only through |tau|.
cplx tau_kernel(double omega, double tau, const EmitterParams& params);

/// |chi_mu chi_mu' + T(w, tau)|^2, finite everywhere.
double g2_weak_numerator(PortPair pair, double omega, double tau, const EmitterParams& params);

/// Weak-drive g2 of a port pair. Throws DegenerateError when the port
/// amplitude product vanishes; use g2_weak_numerator there.
double g2_weak(PortPair pair, double omega, double tau, const EmitterParams& params);

}  // namespace wgqed::analytic
