// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "wgqed/analytic.hpp"
#include "wgqed/config.hpp"
#include "wgqed/dynamics.hpp"
#include "wgqed/fit.hpp"
#include "wgqed/imperfect.hpp"
#include "wgqed/reconstruct.hpp"
#include "wgqed/simulate.hpp"

using namespace wgqed;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("threw: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = dt <= budget_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s %2d %s: %s [%.2f s of %.0f s]%s\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), dt, budget_s,
              in_time ? "" : " over budget");
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double deg(double rad) { return rad * 180.0 / kPi; }

// Phase of v relative to ref, unwrapped along the sequence.
std::vector<double> unwrapped_phase(const std::vector<cplx>& v, cplx ref) {
  std::vector<double> out(v.size());
  double last = 0.0, offset = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::arg(v[i] / ref);
    if (i > 0) {
      if (a - last > kPi) offset -= 2.0 * kPi;
      if (a - last < -kPi) offset += 2.0 * kPi;
    }
    last = a;
    out[i] = a + offset;
  }
  return out;
}

const Config kRef = reference_config();
const fit::ModelParams kModel = kRef.model();
const EmitterParams kTable = kModel.emitter;

}  // namespace

int main() {
  const double gamma = kTable.gamma_tot;
  const double weakest = kRef.drive.scan_powers.front();

  std::printf("info: Table I spectral-diffusion widths used as sigma_short = %.2f, sigma_long = %.2f rad/ns\n",
              kModel.noise.sigma_short, kModel.noise.sigma_long);

  run(1, "resonant extinction", 1.0, [&] {
    const double it = imperfect::averaged_intensity(Port::t, kTable.omega0, kModel.rabi(weakest), kTable,
                                                    kModel.noise.sigma_short);
    // Same device with the widths read as cyclic frequencies, for the record.
    const double cyc = imperfect::averaged_intensity(Port::t, kTable.omega0, kModel.rabi(weakest), kTable,
                                                     2.0 * kPi * kModel.noise.sigma_short);
    return Outcome{1.0 - it >= 0.80,
                   fmt("I_t(w0) = %.3f at %.0f uW, extinction %.1f%% (need >= 80%%, quoted > 85%%); "
                       "cyclic-width reading would give I_t = %.3f",
                       it, weakest, 100.0 * (1.0 - it), cyc)};
  });

  run(2, "bunching magnitude", 30.0, [&] {
    const double power = kRef.drive.g2_power_uw(gamma);
    const auto tau = make_grid(-1.5, 1.5, 61);
    const auto g = imperfect::imperfect_g2(PortPair::tt, kTable.omega0, kModel.rabi(power), tau, kTable, kModel.noise);
    const double g0 = g.values[30];
    NoiseModel cyc = kModel.noise;
    cyc.sigma_long *= 2.0 * kPi;
    const double gc =
        imperfect::imperfect_g2(PortPair::tt, kTable.omega0, kModel.rabi(power), tau, kTable, cyc).values[30];
    return Outcome{g0 >= 3.5 && g0 <= 6.5,
                   fmt("g2_tt(0) = %.2f at n = %.3f (need 3.5..6.5); cyclic-width reading would give %.2f", g0,
                       saturation_from_rabi(kModel.rabi(power), gamma), gc)};
  });

  run(3, "phase shifts", 10.0, [&] {
    const auto grid = make_grid(-10.0 * gamma, 10.0 * gamma, 2048);
    const auto it =
        imperfect::averaged_intensity_scan(Port::t, grid, kModel.rabi(weakest), kTable, kModel.noise.sigma_short);
    const cplx z = analytic::fano_z(kTable.xi);
    const auto s = reconstruct::reconstruct_single(it, grid, kTable.beta, z);
    // Shifts relative to the emitter-free background z and z - 1 within 1.5 gamma of the line.
    std::vector<cplx> t, r;
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (std::abs(grid[i] - kTable.omega0) <= 1.5 * gamma) {
        t.push_back(s.t.values[i]);
        r.push_back(s.r.values[i]);
      }
    double tmin = 1e9, rmax = -1e9;
    for (double a : unwrapped_phase(t, z)) tmin = std::min(tmin, deg(a));
    for (double a : unwrapped_phase(r, z - 1.0)) rmax = std::max(rmax, deg(a));
    return Outcome{std::abs(rmax - 150.0) <= 15.0 && std::abs(tmin + 40.0) <= 15.0,
                   fmt("max phase shift of r = %.1f deg (150 +- 15), min phase shift of t = %.1f deg (-40 +- 15)",
                       rmax, tmin)};
  });

  run(4, "weak-drive oracle equivalence", 5.0, [&] {
    const EmitterParams ideal{1.0, gamma, 0.0, 0.0, 0.0};
    const cplx rabi = rabi_from_saturation(1e-3, gamma);
    const auto tau = make_grid(0.0, 5.0 / gamma, 51);
    double worst = 0.0;
    struct Case {
      PortPair pair;
      double omega;
    };
    const Case cases[] = {{PortPair::rr, 0.0},        {PortPair::tt, 0.5 * gamma}, {PortPair::rr, 0.5 * gamma},
                          {PortPair::tr, 0.5 * gamma}, {PortPair::tt, gamma},       {PortPair::tr, gamma},
                          {PortPair::tt, 5.0 * gamma}, {PortPair::rr, 5.0 * gamma}};
    for (const auto& c : cases) {
      const auto full = dynamics::g2_full(c.pair, c.omega, rabi, tau, ideal);
      for (std::size_t k = 0; k < tau.size(); ++k) {
        const double weak = analytic::g2_weak(c.pair, c.omega, tau[k], ideal);
        worst = std::max(worst, std::abs(full.values[k] - weak) / std::max(std::abs(weak), 1.0));
      }
    }
    return Outcome{worst < 1e-2, fmt("max |full - weak| / max(|weak|, 1) = %.2e over 8 pair/detuning cases "
                                     "(need < 1e-2)",
                                     worst)};
  });

  run(5, "Kramers-Kronig accuracy", 1.0, [&] {
    const auto grid = make_grid(-10.0 * gamma, 10.0 * gamma, 4096);
    std::vector<double> re(grid.size()), im(grid.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const cplx g = analytic::dephasing_response(grid[i], kTable);
      re[i] = g.real();
      im[i] = g.imag();
      peak = std::max(peak, std::abs(g));
    }
    double worst = 0.0;
    for (auto method : {reconstruct::HilbertMethod::fft, reconstruct::HilbertMethod::odd_offset}) {
      reconstruct::KKOptions opt;
      opt.method = method;
      const auto h = reconstruct::kramers_kronig(re, grid, opt);
      for (std::size_t i = 0; i < grid.size(); ++i) worst = std::max(worst, std::abs(h[i] - im[i]) / peak);
    }
    return Outcome{worst < 1e-2, fmt("max |H[Re G] - Im G| / max|G| = %.2e, both methods (need < 1e-2)", worst)};
  });

  run(6, "two-photon round trip", 60.0, [&] {
    const auto wgrid = make_grid(-20.0 * gamma, 20.0 * gamma, 2049);
    const auto tau = make_grid(0.0, 3.5, 701);
    std::vector<double> it(wgrid.size());
    for (std::size_t i = 0; i < wgrid.size(); ++i) it[i] = analytic::weak_intensity_t(wgrid[i], kTable);
    const auto single = reconstruct::reconstruct_single(it, wgrid, kTable.beta, analytic::fano_z(kTable.xi));
    std::vector<double> field(wgrid.size() * tau.size());
    std::vector<double> tt(tau.size()), rr(tau.size()), tr(tau.size());
    for (std::size_t i = 0; i < wgrid.size(); ++i) {
      for (std::size_t k = 0; k < tau.size(); ++k) {
        tt[k] = analytic::g2_weak(PortPair::tt, wgrid[i], tau[k], kTable);
        rr[k] = analytic::g2_weak(PortPair::rr, wgrid[i], tau[k], kTable);
        tr[k] = analytic::g2_weak(PortPair::tr, wgrid[i], tau[k], kTable);
      }
      const auto re = reconstruct::reconstruct_t_real(CorrelationTrace(PortPair::tt, tau, tt),
                                                      CorrelationTrace(PortPair::rr, tau, rr),
                                                      CorrelationTrace(PortPair::tr, tau, tr), single.t.values[i],
                                                      single.r.values[i]);
      std::copy(re.begin(), re.end(), field.begin() + static_cast<std::ptrdiff_t>(i * tau.size()));
    }
    const std::size_t centre = wgrid.size() / 2;
    double peak = 0.0, err_re = 0.0;
    for (std::size_t k = 0; k < tau.size(); ++k) {
      const double want = analytic::tau_kernel(wgrid[centre], tau[k], kTable).real();
      peak = std::max(peak, std::abs(want));
      err_re = std::max(err_re, std::abs(field[centre * tau.size() + k] - want));
    }
    err_re /= peak;
    const auto tf = reconstruct::complete_t(field, wgrid, tau);
    const auto delta = make_grid(-5.0 * gamma, 5.0 * gamma, 201);
    const auto sector = reconstruct::invert_to_sector(wgrid[centre], tf.row(centre), tau, delta);
    double speak = 0.0, err_s = 0.0;
    for (std::size_t k = 0; k < delta.size(); ++k) {
      const cplx want = analytic::sector_T(wgrid[centre], delta[k], kTable);
      speak = std::max(speak, std::abs(want));
      err_s = std::max(err_s, std::abs(sector.values[k] - want));
    }
    err_s /= speak;
    return Outcome{err_re < 0.02 && err_s < 0.05,
                   fmt("Re T(w0, tau) error %.2e of peak (need < 2e-2), sector error %.2e of peak (need < 5e-2)",
                       err_re, err_s)};
  });

  run(7, "printed-combination offset identity", 10.0, [&] {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    const auto tau = make_grid(-1.0, 1.0, 21);
    for (int i = 0; i < 2000; ++i) {
      const double g0 = 0.5 + 11.5 * u(rng);
      const EmitterParams p{0.05 + 0.94 * u(rng), g0, u(rng) < 0.5 ? 0.0 : 0.5 * g0 * u(rng), g0 * (2 * u(rng) - 1),
                            u(rng) - 0.5};
      const double w = p.omega0 + g0 * (4 * u(rng) - 2);
      const auto c = analytic::single_coeffs(w, p);
      std::vector<double> tt(tau.size()), rr(tau.size()), tr(tau.size());
      for (std::size_t k = 0; k < tau.size(); ++k) {
        tt[k] = analytic::g2_weak(PortPair::tt, w, tau[k], p);
        rr[k] = analytic::g2_weak(PortPair::rr, w, tau[k], p);
        tr[k] = analytic::g2_weak(PortPair::tr, w, tau[k], p);
      }
      const CorrelationTrace a(PortPair::tt, tau, tt), b(PortPair::rr, tau, rr), d(PortPair::tr, tau, tr);
      const auto ex = reconstruct::reconstruct_t_real(a, b, d, c.t, c.r, reconstruct::Combination::exact);
      const auto pr = reconstruct::reconstruct_t_real(a, b, d, c.t, c.r, reconstruct::Combination::as_printed);
      const double off = 0.5 * std::pow(std::norm(c.t) - std::norm(c.r), 2);
      for (std::size_t k = 0; k < tau.size(); ++k) worst = std::max(worst, std::abs(pr[k] - ex[k] - off));
    }
    return Outcome{worst < 1e-10,
                   fmt("max |printed - exact - (|t|^2 - |r|^2)^2 / 2| = %.2e over 2000 draws (need < 1e-10)", worst)};
  });

  run(8, "fit recovery and coverage", 600.0, [&] {
    SimulationPlan plan;
    plan.scan_powers = {5.0, 50.0, 250.0};
    plan.scan_grid = make_grid(-2.0 * kPi * 4.0, 2.0 * kPi * 4.0, 61);
    plan.g2_power = kRef.drive.g2_power_uw(gamma);
    plan.tau_grid = make_grid(-1.5, 1.5, 61);
    plan.intensity_scale = 1e4;
    plan.coincidence_scale = 1e4;
    const std::size_t b = fit::index(fit::Param::beta), x = fit::index(fit::Param::xi);
    const int n = std::getenv("WGQED_REPLICATES") ? std::atoi(std::getenv("WGQED_REPLICATES")) : 200;
    int cover_b = 0, cover_x = 0, converged = 0, within = 0;
    double dmax_b = 0.0, dmax_x = 0.0;
    for (int rep = 0; rep < n; ++rep) {
      std::mt19937_64 rng(1000 + rep);
      const auto data = simulate_measurements(kModel, plan, rng);
      fit::FitConfig fc;
      fc.start = kModel;
      fc.gh_order = 31;
      fc.profile_at_bounds = false;
      const auto r = fit::fit(data, fc);
      converged += r.converged();
      cover_b += r.ci_low[b] <= kTable.beta && kTable.beta <= r.ci_high[b];
      cover_x += r.ci_low[x] <= kTable.xi && kTable.xi <= r.ci_high[x];
      const double db = std::abs(r.estimate[b] - kTable.beta), dx = std::abs(r.estimate[x] - kTable.xi);
      within += db <= 0.05 && dx <= 0.02;
      dmax_b = std::max(dmax_b, db);
      dmax_x = std::max(dmax_x, dx);
    }
    const double cb = double(cover_b) / n, cx = double(cover_x) / n;
    auto ok = [](double c) { return c >= 0.90 && c <= 0.99; };
    return Outcome{within == n && ok(cb) && ok(cx),
                   fmt("%d replicates (%d converged): max |d beta| = %.4f (<= 0.05), max |d xi| = %.4f (<= 0.02), "
                       "95%% CI coverage beta %.3f, xi %.3f (need 0.90..0.99)",
                       n, converged, dmax_b, dmax_x, cb, cx)};
  });

  run(9, "identity suite", 30.0, [&] {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto draw = [&] {
      const double g0 = 0.5 + 11.5 * u(rng);
      return EmitterParams{0.05 + 0.94 * u(rng), g0, u(rng) < 0.5 ? 0.0 : 0.5 * g0 * u(rng), g0 * (2 * u(rng) - 1),
                           u(rng) - 0.5};
    };
    double worst_tr = 0.0;
    for (int i = 0; i < 100000; ++i) {
      const auto p = draw();
      const auto c = analytic::single_coeffs(p.omega0 + p.gamma_tot * (40 * u(rng) - 20), p);
      worst_tr = std::max(worst_tr, std::abs(c.t - 1.0 - c.r) / std::max(1.0, std::abs(c.t)));
    }
    double worst_ss = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const auto p = draw();
      const cplx rabi = std::polar(p.gamma_tot * (1e-3 + 3 * u(rng)), 2 * kPi * u(rng));
      const auto ss = dynamics::steady_state(
          dynamics::build_liouvillian(p.omega0 + p.gamma_tot * (10 * u(rng) - 5), rabi, p));
      const double rhs = 2.0 * (std::conj(rabi) * ss.coherence()).real() / p.gamma_tot;
      worst_ss = std::max(worst_ss, std::abs(ss.excited_population() - rhs));
    }
    const double eps = std::numeric_limits<double>::epsilon();
    return Outcome{worst_tr <= 4.0 * eps && worst_ss < 1e-10,
                   fmt("max |t - 1 - r| = %.1f eps over 1e5 draws (need <= 4 eps); steady-state identity residual "
                       "%.2e over 1e4 draws (need < 1e-10)",
                       worst_tr / eps, worst_ss)};
  });

  run(10, "ideal-limit bunching", 5.0, [&] {
    const EmitterParams ideal{kTable.beta, gamma, 0.0, 0.0, 0.0};
    const double b = ideal.beta;
    const double formula = std::pow(1.0 - 2.0 * b, 2) / std::pow(1.0 - b, 4);
    const double weak = analytic::g2_weak(PortPair::tt, 0.0, 0.0, ideal);
    const auto tau = make_grid(0.0, 1.0, 11);
    const double full = dynamics::g2_full(PortPair::tt, 0.0, rabi_from_saturation(1e-6, gamma), tau, ideal).values[0];
    const double power = kRef.drive.g2_power_uw(gamma);
    const double imperfect = imperfect::imperfect_g2(PortPair::tt, kTable.omega0, kModel.rabi(power),
                                                     make_grid(-1.5, 1.5, 61), kTable, kModel.noise)
                                 .values[30];
    const bool ok = std::abs(weak / formula - 1.0) < 1e-10 && std::abs(full / formula - 1.0) < 1e-2 &&
                    formula > 100.0 * imperfect;
    return Outcome{ok, fmt("(1-2b)^2/(1-b)^4 = %.1f, analytic %.1f, regression at n = 1e-6 %.1f; "
                           "ratio to imperfect g2_tt(0) = %.2f is %.0fx (need > 100x)",
                           formula, weak, full, imperfect, formula / imperfect)};
  });

  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
