#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "wgqed/analytic.hpp"

using namespace wgqed;
using namespace wgqed::analytic;
using wgqed::testing::Gen;
using wgqed::testing::rel;

namespace {

constexpr double kPi = std::numbers::pi;

const EmitterParams kTable{0.87, 7.65, 0.0, 0.0, -0.26};

// Ideal-emitter reflection written out as in the single-photon literature.
cplx ideal_r(double omega, const EmitterParams& p) {
  return -p.beta * p.gamma_tot / cplx(p.gamma_tot, -2.0 * (omega - p.omega0));
}

}  // namespace

TEST_CASE("response function is a Lorentzian of half-width gamma/2 + gamma_d") {
  Gen g(11);
  for (int i = 0; i < 200; ++i) {
    const auto p = g.emitter();
    const double w = p.omega0 + g.uniform(-5, 5) * p.gamma_tot;
    const double x = w - p.omega0;
    const double b = 0.5 * p.gamma_tot + p.gamma_d;
    const cplx expect = 0.5 * p.gamma_tot * cplx(b, x) / (b * b + x * x);
    CHECK(rel(dephasing_response(w, p), expect) < 1e-14);
  }
  // Peak value with dephasing: (gamma/2) / (gamma/2 + gamma_d).
  const EmitterParams p{0.5, 2.0, 0.5, 0.0, 0.0};
  CHECK(dephasing_response(0.0, p).real() == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("t and r follow the input-output relations and t = 1 + r") {
  Gen g(12);
  for (int i = 0; i < 100000; ++i) {
    const auto p = g.emitter();
    const double w = p.omega0 + g.uniform(-20, 20) * p.gamma_tot;
    const auto geo = ScatterGeometry::from_xi(p.xi);
    const cplx zz = geo.z * geo.z / geo.z_norm2();
    const cplx scattered = zz * p.beta * dephasing_response(w, p);
    const auto c = single_coeffs(w, p);
    REQUIRE(std::abs(c.t - (geo.lambda_tt - scattered)) < 1e-14);
    REQUIRE(std::abs(c.r - (geo.lambda_rt - scattered)) < 1e-14);
    REQUIRE(std::abs(c.t - 1.0 - c.r) < 1e-15);
  }
}

TEST_CASE("ideal emitter reproduces the textbook coefficients") {
  Gen g(13);
  for (int i = 0; i < 200; ++i) {
    EmitterParams p = g.emitter();
    p.gamma_d = 0.0;
    p.xi = 0.0;
    const double w = p.omega0 + g.uniform(-6, 6) * p.gamma_tot;
    const auto c = single_coeffs(w, p);
    CHECK(rel(c.r, ideal_r(w, p)) < 1e-13);
    CHECK(rel(c.t, 1.0 + ideal_r(w, p)) < 1e-13);
  }
  const EmitterParams unit{1.0, 3.0, 0.0, 0.0, 0.0};
  CHECK(std::abs(single_coeffs(0.0, unit).t) < 1e-15);
  CHECK(std::abs(single_coeffs(0.0, unit).r + 1.0) < 1e-15);
}

TEST_CASE("weak-drive transmitted intensity") {
  Gen g(14);
  for (int i = 0; i < 300; ++i) {
    auto p = g.emitter();
    const double w = p.omega0 + g.uniform(-8, 8) * p.gamma_tot;
    // Fano-free form used for the single-photon inversion.
    p.xi = 0.0;
    const auto c = single_coeffs(w, p);
    CHECK(weak_intensity_t(w, p) == doctest::Approx(p.beta - 1.0 + (2.0 - p.beta) * c.t.real()).epsilon(1e-13));
    // Without dephasing all of the output is coherent.
    p.gamma_d = 0.0;
    CHECK(weak_intensity_t(w, p) == doctest::Approx(std::norm(single_coeffs(w, p).t)).epsilon(1e-12));
  }
  CHECK(weak_intensity_t(1e6, kTable) == doctest::Approx(1.0).epsilon(1e-5));
  // Resonant extinction of the reference device without broadening.
  CHECK(weak_intensity_t(0.0, kTable) < 0.1);
}

TEST_CASE("vectorised evaluations agree with the scalar path") {
  Gen g(15);
  for (int i = 0; i < 20; ++i) {
    const auto p = g.emitter();
    std::vector<double> w(static_cast<std::size_t>(g.integer(1, 67)));
    for (double& v : w) v = g.uniform(-10, 10) * p.gamma_tot;
    const auto gv = dephasing_response(w, p);
    const auto iv = weak_intensity_t(w, p);
    for (std::size_t k = 0; k < w.size(); ++k) {
      CHECK(rel(gv[k], dephasing_response(w[k], p)) < 1e-14);
      CHECK(iv[k] == doctest::Approx(weak_intensity_t(w[k], p)).epsilon(1e-13));
    }
  }
}

TEST_CASE("two-photon kernel") {
  SUBCASE("ideal form built from reflection amplitudes") {
    Gen g(16);
    for (int i = 0; i < 200; ++i) {
      EmitterParams p = g.emitter();
      p.gamma_d = 0.0;
      p.xi = 0.0;
      const double s = p.gamma_tot;
      const double n1 = g.uniform(-3, 3) * s, n2 = g.uniform(-3, 3) * s;
      const double o1 = g.uniform(-3, 3) * s, o2 = g.uniform(-3, 3) * s;
      const cplx expect = 4.0 / (kPi * p.beta * p.gamma_tot) * ideal_r(n1, p) * ideal_r(n2, p) * ideal_r(o1, p) *
                          ideal_r(o2, p) / ideal_r(0.5 * (o1 + o2), p);
      CHECK(rel(two_photon_T(n1, n2, o1, o2, p), expect) < 1e-12);
    }
  }
  SUBCASE("sector is the energy-conserving slice") {
    Gen g(17);
    for (int i = 0; i < 200; ++i) {
      const auto p = g.emitter();
      const double w = p.omega0 + g.uniform(-3, 3) * p.gamma_tot;
      const double d = g.uniform(-5, 5) * p.gamma_tot;
      CHECK(rel(sector_T(w, d, p), two_photon_T(w - d, w + d, w, w, p)) < 1e-12);
    }
  }
  SUBCASE("resonant sector value of the ideal emitter") {
    const EmitterParams p{1.0, 7.65, 0.0, 0.0, 0.0};
    CHECK(rel(sector_T(0.0, 0.0, p), -4.0 / (kPi * 7.65)) < 1e-14);
  }
  SUBCASE("delay kernel is even and decays at gamma/2 + gamma_d") {
    Gen g(18);
    for (int i = 0; i < 100; ++i) {
      const auto p = g.emitter();
      const double w = p.omega0 + g.uniform(-3, 3) * p.gamma_tot;
      const double tau = g.uniform(0, 3) / p.gamma_tot;
      CHECK(rel(tau_kernel(w, tau, p), tau_kernel(w, -tau, p)) < 1e-15);
      const double decay = std::abs(tau_kernel(w, tau, p)) / std::abs(tau_kernel(w, 0.0, p));
      CHECK(decay == doctest::Approx(std::exp(-(0.5 * p.gamma_tot + p.gamma_d) * tau)).epsilon(1e-12));
    }
  }
  SUBCASE("ideal delay kernel equals -r^2 exp(-|tau|(gamma/2 - i detuning))") {
    const EmitterParams p{0.87, 7.65, 0.0, 0.0, 0.0};
    for (double w : {-5.0, 0.0, 2.0})
      for (double tau : {-0.3, 0.0, 0.1}) {
        const cplx r = ideal_r(w, p);
        const cplx expect = -r * r * std::exp(-std::abs(tau) * cplx(0.5 * p.gamma_tot, -w));
        CHECK(rel(tau_kernel(w, tau, p), expect) < 1e-13);
      }
  }
  SUBCASE("delay kernel and sector are a Fourier pair") {
    Gen g(19);
    for (int i = 0; i < 8; ++i) {
      const auto p = g.emitter();
      const double w = p.omega0 + g.uniform(-2, 2) * p.gamma_tot;
      const double d = g.uniform(-3, 3) * p.gamma_tot;
      const double span = 60.0 / (0.5 * p.gamma_tot + p.gamma_d);
      // T = (1/pi) int dtau exp(i D tau) T(w, tau), split at the kink
      auto f = [&](double tau) { return std::exp(cplx(0.0, d * tau)) * tau_kernel(w, tau, p); };
      const cplx integral = wgqed::testing::trapezoid(f, -span, 0.0, 200000) +
                            wgqed::testing::trapezoid(f, 0.0, span, 200000);
      CHECK(rel(integral / kPi, sector_T(w, d, p)) < 1e-6);
    }
  }
}

TEST_CASE("weak-drive correlations") {
  SUBCASE("ideal bunching in transmission") {
    for (double beta : {0.3, 0.6, 0.87, 0.95}) {
      const EmitterParams p{beta, 7.65, 0.0, 0.0, 0.0};
      const double expect = std::pow(1.0 - 2.0 * beta, 2) / std::pow(1.0 - beta, 4);
      CHECK(g2_weak(PortPair::tt, 0.0, 0.0, p) == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(g2_weak(PortPair::tt, 0.0, 0.0, {0.87, 7.65, 0.0, 0.0, 0.0}) == doctest::Approx(1917.3).epsilon(1e-4));
  }
  SUBCASE("ideal reflection is perfectly antibunched at every detuning") {
    Gen g(20);
    for (int i = 0; i < 100; ++i) {
      EmitterParams p = g.emitter();
      p.gamma_d = 0.0;
      p.xi = 0.0;
      const double w = p.omega0 + g.uniform(-5, 5) * p.gamma_tot;
      CHECK(g2_weak(PortPair::rr, w, 0.0, p) < 1e-20);
    }
  }
  SUBCASE("correlations vanish at long delay and tr equals rt") {
    Gen g(21);
    for (int i = 0; i < 100; ++i) {
      const auto p = g.emitter();
      const double w = p.omega0 + g.uniform(-3, 3) * p.gamma_tot;
      const double tau = g.uniform(0, 2) / p.gamma_tot;
      CHECK(g2_weak(PortPair::tt, w, 80.0 / p.gamma_tot, p) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(g2_weak(PortPair::tr, w, tau, p) == doctest::Approx(g2_weak(PortPair::rt, w, tau, p)).epsilon(1e-12));
      const auto c = single_coeffs(w, p);
      CHECK(g2_weak_numerator(PortPair::tt, w, tau, p) ==
            doctest::Approx(g2_weak(PortPair::tt, w, tau, p) * std::norm(c.t * c.t)).epsilon(1e-10));
    }
  }
  SUBCASE("vanishing amplitudes raise instead of dividing by zero") {
    const EmitterParams p{1.0, 7.65, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(g2_weak(PortPair::tt, 0.0, 0.0, p), DegenerateError);
    CHECK(std::isfinite(g2_weak_numerator(PortPair::tt, 0.0, 0.0, p)));
    CHECK(g2_weak_numerator(PortPair::tt, 0.0, 0.0, p) == doctest::Approx(1.0));
  }
}
