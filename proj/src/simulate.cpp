#include "wgqed/simulate.hpp"

#include <algorithm>

#include "wgqed/imperfect.hpp"

namespace wgqed {

namespace {

double observe(double model, double scale, bool noisy, std::mt19937_64& rng, double& counts) {
  const double expected = model * scale;
  if (!(scale > 0.0)) {
    counts = 0.0;
    return model;
  }
  if (!noisy) {
    counts = expected;
    return model;
  }
  std::poisson_distribution<long long> pd(std::max(expected, 0.0));
  counts = static_cast<double>(expected > 0.0 ? pd(rng) : 0);
  return counts / scale;
}

}  // namespace

SimulationPlan SimulationPlan::from_config(const Config& cfg) {
  SimulationPlan p;
  p.scan_powers = cfg.drive.scan_powers;
  p.scan_grid = cfg.grids.scan_grid();
  p.intensity_scale = cfg.shot.count_rate * cfg.shot.intensity_exposure;
  p.g2_power = cfg.drive.g2_power_uw(cfg.emitter.gamma_tot);
  p.g2_detunings = cfg.drive.g2_detunings;
  p.tau_grid = cfg.grids.tau_grid();
  p.pairs = cfg.pairs;
  // coincidences per bin: rate^2 * bin width * exposure
  p.coincidence_scale = cfg.shot.count_rate * cfg.shot.count_rate * p.tau_grid.step * 1e-9 * cfg.shot.g2_exposure;
  p.noisy = cfg.shot.enabled;
  return p;
}

MeasurementSet simulate_measurements(const fit::ModelParams& model, const SimulationPlan& plan,
                                     std::mt19937_64& rng) {
  MeasurementSet set;
  set.gamma_tot_fixed = model.emitter.gamma_tot;
  for (double p : plan.scan_powers) {
    IntensityScan s;
    s.power_uw = p;
    s.omega = plan.scan_grid;
    s.intensity = imperfect::averaged_intensity_scan(Port::t, plan.scan_grid, model.rabi(p), model.emitter,
                                                     model.noise.sigma_short);
    s.counts.resize(s.intensity.size());
    for (std::size_t i = 0; i < s.intensity.size(); ++i)
      s.intensity[i] = observe(s.intensity[i], plan.intensity_scale, plan.noisy, rng, s.counts[i]);
    set.intensity_scans.push_back(std::move(s));
  }
  const cplx rabi = model.rabi(plan.g2_power);
  for (double omega : plan.g2_detunings) {
    for (PortPair pair : plan.pairs) {
      G2Record rec;
      rec.power_uw = plan.g2_power;
      rec.omega = omega;
      std::vector<double> v =
          imperfect::imperfect_g2(pair, omega, rabi, plan.tau_grid, model.emitter, model.noise).values;
      rec.coincidences.resize(v.size());
      for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = observe(v[i], plan.coincidence_scale, plan.noisy, rng, rec.coincidences[i]);
      rec.trace = CorrelationTrace(pair, plan.tau_grid, std::move(v));
      set.g2_traces.push_back(std::move(rec));
    }
  }
  return set;
}

}  // namespace wgqed
