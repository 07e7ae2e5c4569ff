#pragma once

// Experiment configuration read from an INI file with sections [emitter],
// [noise], [drive], [grids] and [fit]. Detunings in the file are linear
// (GHz) and converted to rad/ns on load; rates and the spectral-diffusion
// widths are given in 1/ns, delays in ns.

#include <filesystem>
#include <string>
#include <vector>

#include "wgqed/core.hpp"
#include "wgqed/fit.hpp"

namespace wgqed {

struct ShotNoise {
  bool enabled = true;
  double count_rate = 1e6;           // detected photons per second at unit transmission
  double intensity_exposure = 0.01;  // seconds per spectral point
  double g2_exposure = 3600.0;       // seconds per correlation histogram
};

struct DrivePlan {
  double eta = 0.11;                       // ns^-2 / uW
  std::vector<double> scan_powers{};       // uW
  double g2_saturation = 0.1;              // n used when g2_power is not given
  double g2_power = 0.0;                   // uW; 0 means derive from g2_saturation
  std::vector<double> g2_detunings{0.0};   // rad/ns

  double g2_power_uw(double gamma_tot) const;
};

struct GridPlan {
  double scan_half_span = angular_from_linear(8.0);  // rad/ns
  std::size_t scan_points = 121;
  double tau_half_span = 3.0;  // ns
  std::size_t tau_points = 121;
  bool tau_symmetric = true;
  double delta_half_span = angular_from_linear(4.0);  // rad/ns, sector output
  std::size_t delta_points = 201;

  UniformGrid scan_grid() const;
  UniformGrid tau_grid() const;
  UniformGrid delta_grid() const;
};

struct Config {
  std::filesystem::path source;
  EmitterParams emitter;
  NoiseModel noise;
  ShotNoise shot;
  DrivePlan drive;
  GridPlan grids;
  std::vector<PortPair> pairs{PortPair::tt, PortPair::rr, PortPair::tr};
  fit::FitConfig fit;

  fit::ModelParams model() const;
};

/// Throws ConfigError naming the file, section, key and line on any problem.
Config load_config(const std::filesystem::path& path);
Config parse_config(const std::string& text, const std::string& origin = "<string>");

/// Table I defaults of the reference device, used by the example config.
Config reference_config();

}  // namespace wgqed
