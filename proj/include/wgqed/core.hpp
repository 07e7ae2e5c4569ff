#pragma once

// Shared domain types for the waveguide scattering toolkit.
//
// Conventions: every rate and frequency is stored in rad/ns, every delay in
// ns. Frequencies are detunings from a reference (by default the emitter
// transition), which keeps grid magnitudes O(gamma_tot).

#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wgqed {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A physical parameter is outside its allowed range.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// The sampled interval is too narrow for a transform or average to be trusted.
class SpanError : public Error {
 public:
  using Error::Error;
};

/// A normalisation or inversion divides by a quantity that vanishes.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

class IdentifiabilityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Units
// ---------------------------------------------------------------------------

/// GHz -> rad/ns.
constexpr double angular_from_linear(double f_ghz) { return 2.0 * std::numbers::pi * f_ghz; }
/// rad/ns -> GHz.
constexpr double linear_from_angular(double w) { return w / (2.0 * std::numbers::pi); }

// ---------------------------------------------------------------------------
// Emitter
// ---------------------------------------------------------------------------

struct EmitterParams {
  double beta = 1.0;       // waveguide coupling efficiency
  double gamma_tot = 1.0;  // total decay rate, 1/ns
  double gamma_d = 0.0;    // pure dephasing rate, 1/ns
  double omega0 = 0.0;     // transition frequency relative to the reference, rad/ns
  double xi = 0.0;         // Fano parameter
};

/// Returns `params` unchanged or throws DomainError naming the violated bound.
EmitterParams validate(const EmitterParams& params);

enum class Port { t, r };

enum class PortPair { tt, rr, tr, rt };

Port first_port(PortPair pair);
Port second_port(PortPair pair);
PortPair swapped(PortPair pair);
std::string to_string(PortPair pair);
PortPair parse_port_pair(std::string_view text);

/// Fano-dressed input-output coefficients, Lambda_{mu mu'} = delta + z - 1.
struct ScatterGeometry {
  cplx z{1.0, 0.0};
  cplx lambda_tt{1.0, 0.0};
  cplx lambda_rt{0.0, 0.0};

  static ScatterGeometry from_xi(double xi);

  /// Lambda_{mu t}: amplitude with which the driven t input reaches port mu.
  cplx lambda(Port mu) const { return mu == Port::t ? lambda_tt : lambda_rt; }
  double z_norm2() const { return std::norm(z); }
};

// ---------------------------------------------------------------------------
// Drive and noise
// ---------------------------------------------------------------------------

struct DriveSpec {
  static constexpr double kDefaultWeakThreshold = 1e-2;

  double omega = 0.0;    // laser frequency, rad/ns
  cplx rabi{0.0, 0.0};   // drive strength Omega, 1/ns
  double flux_scale = 1.0;
  bool weak = true;

  static DriveSpec create(double omega, cplx rabi, double gamma_tot,
                          double flux_scale = 1.0,
                          double weak_threshold = kDefaultWeakThreshold);

  /// Mean photon number per lifetime, n = 2|Omega|^2 / gamma_tot^2.
  double saturation(double gamma_tot) const;
};

/// |Omega| for a given saturation parameter n.
double rabi_from_saturation(double n, double gamma_tot);
double saturation_from_rabi(cplx rabi, double gamma_tot);

struct NoiseModel {
  double sigma_short = 0.0;  // spectral diffusion during intensity scans, rad/ns
  double sigma_long = 0.0;   // spectral diffusion during g2 acquisitions, rad/ns
  double sigma_irf = 0.0;    // detector response, ns
  std::map<PortPair, double> background;

  /// Background fraction for a port pair; tr and rt share one value.
  double background_for(PortPair pair) const;
  void validate() const;
};

// ---------------------------------------------------------------------------
// Grids and sampled data
// ---------------------------------------------------------------------------

struct UniformGrid {
  double lo = 0.0;
  double step = 1.0;
  std::size_t n = 0;

  double operator[](std::size_t i) const { return lo + step * static_cast<double>(i); }
  double hi() const { return (*this)[n - 1]; }
  double span() const { return hi() - lo; }
  std::size_t size() const { return n; }
  std::vector<double> values() const;

  bool symmetric_about_zero() const;
  bool starts_at_zero() const;
  bool same_as(const UniformGrid& other, double rel_tol = 1e-9) const;
};

/// n equally spaced samples from lo to hi inclusive.
UniformGrid make_grid(double lo, double hi, std::size_t n);

struct ComplexSpectrum {
  UniformGrid grid;
  std::vector<cplx> values;

  ComplexSpectrum() = default;
  ComplexSpectrum(UniformGrid g, std::vector<cplx> v);
};

/// Real g2 samples on a delay grid that is either symmetric about zero or
/// starts at zero.
struct CorrelationTrace {
  PortPair pair = PortPair::tt;
  UniformGrid tau;
  std::vector<double> values;

  CorrelationTrace() = default;
  CorrelationTrace(PortPair p, UniformGrid t, std::vector<double> v);
};

/// Monochromatic sector T(omega - Delta, omega + Delta, omega, omega).
struct TwoPhotonSector {
  double omega = 0.0;
  UniformGrid delta;
  std::vector<cplx> values;
};

struct IntensityScan {
  double power_uw = 0.0;
  UniformGrid omega;
  std::vector<double> intensity;
  std::vector<double> counts;  // empty when no count statistics exist
};

struct G2Record {
  CorrelationTrace trace;
  double power_uw = 0.0;
  double omega = 0.0;  // drive detuning, rad/ns
  std::vector<double> coincidences;
};

struct MeasurementSet {
  std::vector<IntensityScan> intensity_scans;
  std::vector<G2Record> g2_traces;
  double gamma_tot_fixed = 0.0;
};

}  // namespace wgqed
