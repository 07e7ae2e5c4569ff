#include "wgqed/analytic.hpp"

#include <cmath>
#include <numbers>

#include "wgqed/simd.hpp"

namespace wgqed::analytic {

namespace {

// z^4 / |z|^4, a pure phase.
cplx fano_phase4(cplx z) {
  const cplx u = z / std::abs(z);
  const cplx u2 = u * u;
  return u2 * u2;
}

double half_width(const EmitterParams& p) { return 0.5 * p.gamma_tot + p.gamma_d; }

}  // namespace

cplx fano_z(double xi) { return 1.0 / cplx(1.0, xi); }

cplx dephasing_response(double omega, const EmitterParams& params) {
  const double a = 0.5 * params.gamma_tot;
  return a / cplx(half_width(params), -(omega - params.omega0));
}

std::vector<cplx> dephasing_response(std::span<const double> omegas, const EmitterParams& params) {
  std::vector<double> x(omegas.size()), re(omegas.size()), im(omegas.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = omegas[i] - params.omega0;
  simd::lorentz_response(x, 0.5 * params.gamma_tot, half_width(params), re, im);
  std::vector<cplx> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = {re[i], im[i]};
  return out;
}

SingleCoeffs coeffs_from_response(cplx response, double beta, cplx z) {
  const cplx t = z * (1.0 - z * beta * response / std::norm(z));
  return {t, t - 1.0};
}

SingleCoeffs single_coeffs(double omega, const EmitterParams& params) {
  return coeffs_from_response(dephasing_response(omega, params), params.beta, fano_z(params.xi));
}

cplx intensity_coefficient(double beta, cplx z) { return (beta / std::norm(z)) * (beta - 2.0 * z); }

double weak_intensity_t(double omega, const EmitterParams& params) {
  const cplx R = intensity_coefficient(params.beta, fano_z(params.xi));
  return 1.0 + (R * dephasing_response(omega, params)).real();
}

std::vector<double> weak_intensity_t(std::span<const double> omegas, const EmitterParams& params) {
  std::vector<double> x(omegas.size()), out(omegas.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = omegas[i] - params.omega0;
  simd::weak_intensity(x, 0.5 * params.gamma_tot, half_width(params),
                       intensity_coefficient(params.beta, fano_z(params.xi)), out);
  return out;
}

cplx two_photon_T(double nu1, double nu2, double om1, double om2, const EmitterParams& params) {
  const cplx z = fano_z(params.xi);
  const double pref = -4.0 * params.beta * params.beta / (std::numbers::pi * params.gamma_tot);
  const cplx num = dephasing_response(nu1, params) * dephasing_response(nu2, params) *
                   dephasing_response(om1, params) * dephasing_response(om2, params);
  return pref * fano_phase4(z) * num / dephasing_response(0.5 * (om1 + om2), params);
}

cplx sector_T(double omega, double delta, const EmitterParams& params) {
  const cplx z = fano_z(params.xi);
  const double pref = -4.0 * params.beta * params.beta / (std::numbers::pi * params.gamma_tot);
  const cplx g = dephasing_response(omega, params);
  const cplx q = 2.0 * g * delta / params.gamma_tot;
  return pref * fano_phase4(z) * (g * g * g / (1.0 + q * q));
}

cplx tau_kernel(double omega, double tau, const EmitterParams& params) {
  const cplx z = fano_z(params.xi);
  const cplx g = dephasing_response(omega, params);
  const cplx rate(half_width(params), -(omega - params.omega0));
  return -params.beta * params.beta * fano_phase4(z) * g * g * std::exp(-rate * std::abs(tau));
}

double g2_weak_numerator(PortPair pair, double omega, double tau, const EmitterParams& params) {
  const SingleCoeffs c = single_coeffs(omega, params);
  const cplx chi = c.amplitude(first_port(pair)) * c.amplitude(second_port(pair));
  return std::norm(chi + tau_kernel(omega, tau, params));
}

double g2_weak(PortPair pair, double omega, double tau, const EmitterParams& params) {
  const SingleCoeffs c = single_coeffs(omega, params);
  const cplx chi = c.amplitude(first_port(pair)) * c.amplitude(second_port(pair));
  const double den = std::norm(chi);
  if (!(den > 1e-30))
    throw DegenerateError("g2_weak: port amplitude product vanishes for pair " + to_string(pair) +
                          "; evaluate g2_weak_numerator instead");
  return std::norm(chi + tau_kernel(omega, tau, params)) / den;
}

}  // namespace wgqed::analytic
