#include "wgqed/reconstruct.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "wgqed/analytic.hpp"
#include "wgqed/quadrature.hpp"

namespace wgqed::reconstruct {

SingleSpectra reconstruct_single(std::span<const double> intensity_t, const UniformGrid& grid, double beta,
                                 cplx z, const KKOptions& options) {
  if (intensity_t.size() != grid.size()) throw ArgumentError("reconstruct_single: intensity does not match grid");
  const cplx R = analytic::intensity_coefficient(beta, z);
  if (std::abs(R) < 1e-12) throw DegenerateError("reconstruct_single: intensity coefficient R vanishes");

  std::vector<double> re(intensity_t.size());
  for (std::size_t i = 0; i < re.size(); ++i) re[i] = intensity_t[i] - 1.0;
  const auto im = kramers_kronig(re, grid, options);

  std::vector<cplx> g(re.size()), t(re.size()), r(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) {
    g[i] = cplx(re[i], im[i]) / R;
    const auto c = analytic::coeffs_from_response(g[i], beta, z);
    t[i] = c.t;
    r[i] = c.r;
  }
  return {ComplexSpectrum(grid, std::move(g)), ComplexSpectrum(grid, std::move(t)), ComplexSpectrum(grid, std::move(r))};
}

std::vector<double> reconstruct_t_real_numerators(std::span<const double> n_tt, std::span<const double> n_rr,
                                                  std::span<const double> n_tr, cplx t, cplx r,
                                                  Combination combination) {
  if (n_tt.size() != n_rr.size() || n_tt.size() != n_tr.size())
    throw ArgumentError("reconstruct_t_real: traces differ in length");
  const double t2 = std::norm(t);
  const double r2 = std::norm(r);
  const bool exact = combination == Combination::exact;
  const double ott = exact ? t2 * t2 : 0.0;
  const double orr = exact ? r2 * r2 : 0.0;
  const double otr = exact ? t2 * r2 : 0.0;
  std::vector<double> out(n_tt.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = 0.5 * (n_tt[i] - ott) + 0.5 * (n_rr[i] - orr) - (n_tr[i] - otr);
  return out;
}

std::vector<double> reconstruct_t_real(const CorrelationTrace& g_tt, const CorrelationTrace& g_rr,
                                       const CorrelationTrace& g_tr, cplx t, cplx r, Combination combination) {
  if (!g_tt.tau.same_as(g_rr.tau) || !g_tt.tau.same_as(g_tr.tau))
    throw ArgumentError("reconstruct_t_real: the three traces must share one delay grid");
  const double t2 = std::norm(t);
  const double r2 = std::norm(r);
  const std::size_t n = g_tt.values.size();
  std::vector<double> n_tt(n), n_rr(n), n_tr(n);
  for (std::size_t i = 0; i < n; ++i) {
    n_tt[i] = g_tt.values[i] * t2 * t2;
    n_rr[i] = g_rr.values[i] * r2 * r2;
    n_tr[i] = g_tr.values[i] * t2 * r2;
  }
  return reconstruct_t_real_numerators(n_tt, n_rr, n_tr, t, r, combination);
}

std::vector<cplx> TField::row(std::size_t i_omega) const {
  const auto first = values.begin() + static_cast<std::ptrdiff_t>(i_omega * tau.size());
  return {first, first + static_cast<std::ptrdiff_t>(tau.size())};
}

TField complete_t(std::span<const double> re_t, const UniformGrid& omega, const UniformGrid& tau,
                  const KKOptions& options) {
  const std::size_t nw = omega.size();
  const std::size_t nt = tau.size();
  if (re_t.size() != nw * nt) throw ArgumentError("complete_t: field size does not match the grids");
  TField out{omega, tau, std::vector<cplx>(nw * nt)};
  std::vector<double> column(nw);
  for (std::size_t j = 0; j < nt; ++j) {
    for (std::size_t i = 0; i < nw; ++i) column[i] = re_t[i * nt + j];
    std::vector<double> im;
    try {
      im = kramers_kronig(column, omega, options);
    } catch (const SpanError& e) {
      std::ostringstream os;
      os << e.what() << " [at tau = " << tau[j] << " ns]";
      throw SpanError(os.str());
    }
    for (std::size_t i = 0; i < nw; ++i) out.values[i * nt + j] = {column[i], im[i]};
  }
  return out;
}

TwoPhotonSector invert_to_sector(double omega, std::span<const cplx> t_tau, const UniformGrid& tau,
                                 const UniformGrid& delta) {
  if (t_tau.size() != tau.size()) throw ArgumentError("invert_to_sector: values do not match delay grid");
  const bool one_sided = tau.starts_at_zero();
  if (!one_sided && !tau.symmetric_about_zero())
    throw ArgumentError("invert_to_sector: delay grid must start at zero or be symmetric about zero");

  double peak = 0.0;
  for (const cplx& v : t_tau) peak = std::max(peak, std::abs(v));
  TwoPhotonSector out{omega, delta, std::vector<cplx>(delta.size(), 0.0)};
  if (peak == 0.0) return out;
  const double edge = one_sided ? std::abs(t_tau.back()) : std::max(std::abs(t_tau.front()), std::abs(t_tau.back()));
  if (edge > kTauDecayTolerance * peak) {
    std::ostringstream os;
    os << "invert_to_sector: T(tau) has decayed only to " << edge / peak << " of its peak at the delay grid edge ("
       << tau.hi() << " ns); extend the delay span";
    throw SpanError(os.str());
  }

  auto w = trapezoid_weights(tau.size(), tau.step);
  // A one-sided grid stands for the symmetric one; tau = 0 then keeps weight h.
  if (one_sided)
    for (double& x : w) x *= 2.0;
  for (std::size_t k = 0; k < delta.size(); ++k) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < tau.size(); ++j) {
      const double ph = delta[k] * tau[j];
      const cplx kernel = one_sided ? cplx(std::cos(ph), 0.0) : std::polar(1.0, ph);
      acc += w[j] * kernel * t_tau[j];
    }
    out.values[k] = acc / std::numbers::pi;
  }
  return out;
}

}  // namespace wgqed::reconstruct
