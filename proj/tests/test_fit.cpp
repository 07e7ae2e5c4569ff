#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "support.hpp"
#include "wgqed/config.hpp"
#include "wgqed/fit.hpp"
#include "wgqed/simulate.hpp"

using namespace wgqed;
using namespace wgqed::fit;

namespace {

constexpr std::size_t kGh = 15;

ModelParams truth() { return reference_config().model(); }

SimulationPlan small_plan() {
  SimulationPlan plan;
  plan.scan_powers = {5.0, 100.0};
  plan.scan_grid = make_grid(-2.0 * std::numbers::pi * 4.0, 2.0 * std::numbers::pi * 4.0, 31);
  plan.g2_power = 2.0;
  plan.tau_grid = make_grid(-1.0, 1.0, 31);
  plan.noisy = false;
  return plan;
}

MeasurementSet small_data(bool noisy = false, std::uint64_t seed = 7) {
  auto plan = small_plan();
  plan.noisy = noisy;
  std::mt19937_64 rng(seed);
  return simulate_measurements(truth(), plan, rng);
}

FitConfig quick_config(const ModelParams& start) {
  FitConfig fc;
  fc.start = start;
  fc.gh_order = kGh;
  fc.profile_at_bounds = false;
  return fc;
}

}  // namespace

TEST_CASE("parameter names round trip") {
  for (Param p : kAllParams) CHECK(parse_param(param_name(p)) == p);
  CHECK_FALSE(parse_param("gamma_tot").has_value());
  CHECK(param_name(Param::background_rr) == "background_rr");
}

TEST_CASE("parameter arrays") {
  const auto m = truth();
  const auto a = m.to_array();
  CHECK(a[index(Param::beta)] == m.emitter.beta);
  CHECK(a[index(Param::sigma_long)] == m.noise.sigma_long);
  auto b = a;
  b[index(Param::xi)] = 0.1;
  b[index(Param::background_rr)] = 0.3;
  const auto n = m.with(b);
  CHECK(n.emitter.xi == 0.1);
  CHECK(n.noise.background_for(PortPair::rr) == 0.3);
  CHECK(n.emitter.gamma_tot == m.emitter.gamma_tot);
  CHECK(std::abs(m.rabi(4.0)) == doctest::Approx(std::sqrt(m.eta * 4.0)));
  CHECK_THROWS_AS(m.rabi(-1.0), DomainError);
}

TEST_CASE("noiseless data give zero residuals at the truth") {
  const auto data = small_data();
  const auto res = model_residuals(data, truth());
  CHECK(res.size() == 2 * 31 + 3 * 31);
  CHECK(wgqed::testing::max_abs(res) < 1e-9);
  const auto vals = model_values(data, truth(), kGh);
  CHECK(vals.size() == res.size());
  CHECK(vals[15] < 0.3);  // resonant dip of the weak scan
}

TEST_CASE("Jacobian agrees with Richardson-extrapolated differences") {
  const auto data = small_data();
  auto at = truth();
  at.emitter.gamma_d = 0.4;  // off the bound so that central differences apply
  at.noise.background[PortPair::rr] = 0.2;
  const auto fc = quick_config(at);
  const auto J = residual_jacobian(data, at, fc);
  REQUIRE(J.cols() == static_cast<Eigen::Index>(kParamCount));
  const auto base = at.to_array();
  for (std::size_t c = 0; c < kParamCount; ++c) {
    const double h = 1e-3 * std::max(std::abs(base[c]), 1e-2);
    auto diff = [&](double step) {
      auto lo = base, hi = base;
      lo[c] -= step;
      hi[c] += step;
      const auto rl = model_residuals(data, at.with(lo), Weighting::poisson, kGh);
      const auto rh = model_residuals(data, at.with(hi), Weighting::poisson, kGh);
      std::vector<double> d(rl.size());
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = (rh[i] - rl[i]) / (2.0 * step);
      return d;
    };
    const auto d1 = diff(h);
    const auto d2 = diff(0.5 * h);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < d1.size(); ++i) {
      const double ref = (4.0 * d2[i] - d1[i]) / 3.0;
      scale = std::max(scale, std::abs(ref));
      worst = std::max(worst, std::abs(J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) - ref));
    }
    INFO(param_name(static_cast<Param>(c)));
    CHECK(worst < 1e-4 * scale);
  }
}

TEST_CASE("noiseless fit returns the generating parameters") {
  const auto data = small_data();
  auto start = truth();
  start.emitter.beta = 0.75;
  start.emitter.xi = -0.1;
  start.eta *= 1.3;
  start.noise.sigma_short = 0.5;
  start.noise.sigma_long = 0.4;
  start.noise.background[PortPair::rr] = 0.2;
  const auto r = fit::fit(data, quick_config(start));
  CHECK(r.converged());
  const auto want = truth().to_array();
  for (Param p : {Param::beta, Param::xi, Param::eta, Param::sigma_short, Param::sigma_long})
    CHECK(r.estimate[index(p)] == doctest::Approx(want[index(p)]).epsilon(1e-4));
  CHECK(std::abs(r.estimate[index(Param::gamma_d)]) < 1e-3);
  CHECK(r.chi2 < 1e-6);
  CHECK(r.points == data.intensity_scans.size() * 31 + data.g2_traces.size() * 31);
}

TEST_CASE("noisy fit lands near the truth with sensible errors") {
  const auto data = small_data(true, 11);
  const auto r = fit::fit(data, quick_config(truth()));
  CHECK(r.converged());
  for (Param p : {Param::beta, Param::xi}) {
    const double e = r.estimate[index(p)];
    const double want = truth().to_array()[index(p)];
    CHECK(std::abs(e - want) < 5.0 * r.std_error[index(p)] + 1e-3);
    CHECK(r.ci_low[index(p)] < e);
    CHECK(r.ci_high[index(p)] > e);
  }
  CHECK(r.reduced_chi2() == doctest::Approx(1.0).epsilon(0.3));
  CHECK(r.covariance.rows() == static_cast<Eigen::Index>(kParamCount));
}

TEST_CASE("parameters ending on a bound get profile intervals") {
  auto data = small_data(true, 5);
  auto fc = quick_config(truth());
  // Keep the refits cheap: only three free parameters.
  fc.free = {true, true, false, false, false, false, false};
  fc.profile_at_bounds = true;
  const auto r = fit::fit(data, fc);
  const std::size_t gd = index(Param::gamma_d);
  if (r.at_bound[gd]) {
    CHECK(r.profile_ci[gd]);
    CHECK(r.ci_low[gd] == 0.0);
    CHECK(r.ci_high[gd] > 0.0);
  } else {
    CHECK(r.estimate[gd] > 0.0);
  }
  CHECK_FALSE(r.free[index(Param::xi)]);
  CHECK(r.estimate[index(Param::xi)] == truth().emitter.xi);
}

TEST_CASE("unidentifiable configurations are refused") {
  const auto data = small_data();
  SUBCASE("no rr trace with a free rr background") {
    auto d = data;
    std::erase_if(d.g2_traces, [](const G2Record& g) { return g.trace.pair == PortPair::rr; });
    CHECK_THROWS_AS(fit::fit(d, quick_config(truth())), IdentifiabilityError);
  }
  SUBCASE("a single power cannot separate beta and eta") {
    auto d = data;
    d.intensity_scans.resize(1);
    CHECK_THROWS_AS(fit::fit(d, quick_config(truth())), IdentifiabilityError);
    auto fc = quick_config(truth());
    fc.free[index(Param::eta)] = false;
    fc.free[index(Param::gamma_d)] = false;
    CHECK_NOTHROW(fit::fit(d, fc));
  }
  SUBCASE("no correlation traces") {
    auto d = data;
    d.g2_traces.clear();
    CHECK_THROWS_AS(fit::fit(d, quick_config(truth())), IdentifiabilityError);
  }
  SUBCASE("bad bounds are configuration errors") {
    auto fc = quick_config(truth());
    fc.lower[index(Param::sigma_long)] = -1.0;
    CHECK_THROWS_AS(fit::fit(data, fc), ConfigError);
    fc = quick_config(truth());
    fc.lower[index(Param::beta)] = 0.9;
    fc.upper[index(Param::beta)] = 0.8;
    CHECK_THROWS_AS(fit::fit(data, fc), ConfigError);
  }
}

TEST_CASE("saturation curve rises monotonically") {
  const std::vector<double> powers = {0.5, 5.0, 50.0, 500.0, 5000.0};
  const auto c = saturation_curve(powers, truth());
  REQUIRE(c.size() == powers.size());
  for (std::size_t i = 1; i < c.size(); ++i) {
    CHECK(c[i].intensity > c[i - 1].intensity);
    CHECK(c[i].saturation == doctest::Approx(10.0 * c[i - 1].saturation));
  }
  CHECK(c.front().intensity < 0.2);
  CHECK(c.back().intensity > 0.9);
  const std::vector<double> bad = {0.0};
  CHECK_THROWS_AS(saturation_curve(bad, truth()), ArgumentError);
}
