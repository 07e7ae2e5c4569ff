#pragma once

// Synthetic measurement sets drawn from the forward model, with optional
// Poisson counting noise.

#include <random>
#include <vector>

#include "wgqed/config.hpp"
#include "wgqed/core.hpp"
#include "wgqed/fit.hpp"

namespace wgqed {

struct SimulationPlan {
  std::vector<double> scan_powers;  // uW
  UniformGrid scan_grid;
  double intensity_scale = 1e4;  // expected counts at unit transmission
  double g2_power = 1.0;         // uW
  std::vector<double> g2_detunings{0.0};
  UniformGrid tau_grid;
  std::vector<PortPair> pairs{PortPair::tt, PortPair::rr, PortPair::tr};
  double coincidence_scale = 1e4;  // expected coincidences per bin at g2 = 1
  bool noisy = true;

  static SimulationPlan from_config(const Config& cfg);
};

/// Scans in power order, then traces grouped by detuning in `pairs` order.
/// A noiseless plan still fills the expected counts.
MeasurementSet simulate_measurements(const fit::ModelParams& model, const SimulationPlan& plan,
                                     std::mt19937_64& rng);

}  // namespace wgqed
