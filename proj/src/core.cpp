#include "wgqed/core.hpp"

#include <cmath>
#include <sstream>

namespace wgqed {

namespace {

std::string describe(const char* name, double value, const char* bound) {
  std::ostringstream os;
  os << name << " = " << value << " violates " << bound;
  return os.str();
}

}  // namespace

EmitterParams validate(const EmitterParams& params) {
  if (!std::isfinite(params.beta) || params.beta < 0.0 || params.beta > 1.0)
    throw DomainError(describe("beta", params.beta, "0 <= beta <= 1"));
  if (!std::isfinite(params.gamma_tot) || params.gamma_tot <= 0.0)
    throw DomainError(describe("gamma_tot", params.gamma_tot, "gamma_tot > 0"));
  if (!std::isfinite(params.gamma_d) || params.gamma_d < 0.0)
    throw DomainError(describe("gamma_d", params.gamma_d, "gamma_d >= 0"));
  if (!std::isfinite(params.omega0))
    throw DomainError(describe("omega0", params.omega0, "finite omega0"));
  if (!std::isfinite(params.xi))
    throw DomainError(describe("xi", params.xi, "finite xi"));
  return params;
}

Port first_port(PortPair pair) {
  return (pair == PortPair::tt || pair == PortPair::tr) ? Port::t : Port::r;
}

Port second_port(PortPair pair) {
  return (pair == PortPair::tt || pair == PortPair::rt) ? Port::t : Port::r;
}

PortPair swapped(PortPair pair) {
  switch (pair) {
    case PortPair::tr: return PortPair::rt;
    case PortPair::rt: return PortPair::tr;
    default: return pair;
  }
}

std::string to_string(PortPair pair) {
  switch (pair) {
    case PortPair::tt: return "tt";
    case PortPair::rr: return "rr";
    case PortPair::tr: return "tr";
    case PortPair::rt: return "rt";
  }
  return "?";
}

PortPair parse_port_pair(std::string_view text) {
  if (text == "tt") return PortPair::tt;
  if (text == "rr") return PortPair::rr;
  if (text == "tr") return PortPair::tr;
  if (text == "rt") return PortPair::rt;
  throw ArgumentError("unknown port pair '" + std::string(text) + "' (expected tt, rr, tr or rt)");
}

ScatterGeometry ScatterGeometry::from_xi(double xi) {
  if (!std::isfinite(xi)) throw DomainError("xi must be finite");
  ScatterGeometry g;
  g.z = 1.0 / cplx(1.0, xi);
  g.lambda_tt = g.z;
  g.lambda_rt = g.z - 1.0;
  return g;
}

DriveSpec DriveSpec::create(double omega, cplx rabi, double gamma_tot, double flux_scale,
                            double weak_threshold) {
  if (!(gamma_tot > 0.0)) throw DomainError("gamma_tot must be positive");
  DriveSpec d;
  d.omega = omega;
  d.rabi = rabi;
  d.flux_scale = flux_scale;
  d.weak = d.saturation(gamma_tot) < weak_threshold;
  return d;
}

double DriveSpec::saturation(double gamma_tot) const { return saturation_from_rabi(rabi, gamma_tot); }

double rabi_from_saturation(double n, double gamma_tot) {
  if (n < 0.0) throw ArgumentError("saturation parameter must be non-negative");
  return gamma_tot * std::sqrt(0.5 * n);
}

double saturation_from_rabi(cplx rabi, double gamma_tot) {
  return 2.0 * std::norm(rabi) / (gamma_tot * gamma_tot);
}

double NoiseModel::background_for(PortPair pair) const {
  if (auto it = background.find(pair); it != background.end()) return it->second;
  if (auto it = background.find(swapped(pair)); it != background.end()) return it->second;
  return 0.0;
}

void NoiseModel::validate() const {
  if (!(sigma_short >= 0.0)) throw DomainError("sigma_short must be >= 0");
  if (!(sigma_long >= 0.0)) throw DomainError("sigma_long must be >= 0");
  if (!(sigma_irf >= 0.0)) throw DomainError("sigma_irf must be >= 0");
  for (const auto& [pair, b] : background) {
    if (!(b >= 0.0 && b <= 1.0))
      throw DomainError("background for " + to_string(pair) + " must lie in [0, 1]");
  }
}

std::vector<double> UniformGrid::values() const {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = (*this)[i];
  return v;
}

bool UniformGrid::symmetric_about_zero() const {
  return n >= 2 && std::abs(lo + hi()) <= 1e-9 * std::abs(step) * static_cast<double>(n);
}

bool UniformGrid::starts_at_zero() const { return n >= 2 && std::abs(lo) <= 1e-12 * std::abs(step); }

bool UniformGrid::same_as(const UniformGrid& other, double rel_tol) const {
  if (n != other.n) return false;
  const double scale = std::abs(step);
  return std::abs(lo - other.lo) <= rel_tol * scale && std::abs(step - other.step) <= rel_tol * scale;
}

UniformGrid make_grid(double lo, double hi, std::size_t n) {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || !(lo < hi))
    throw ArgumentError("make_grid requires finite lo < hi");
  if (n < 2) throw ArgumentError("make_grid requires at least two samples");
  return UniformGrid{lo, (hi - lo) / static_cast<double>(n - 1), n};
}

ComplexSpectrum::ComplexSpectrum(UniformGrid g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
  if (!(grid.step > 0.0)) throw ArgumentError("spectrum grid must be strictly increasing");
  if (values.size() != grid.n) throw ArgumentError("spectrum values and grid differ in length");
}

CorrelationTrace::CorrelationTrace(PortPair p, UniformGrid t, std::vector<double> v)
    : pair(p), tau(t), values(std::move(v)) {
  if (!(tau.step > 0.0)) throw ArgumentError("delay grid must be strictly increasing");
  if (values.size() != tau.n) throw ArgumentError("trace values and delay grid differ in length");
  if (!tau.symmetric_about_zero() && !tau.starts_at_zero())
    throw ArgumentError("delay grid must be symmetric about zero or start at zero");
  for (double& x : values) {
    // Round-off from normalised differences can dip a hair below zero.
    if (x < 0.0 && x > -1e-9) x = 0.0;
    if (!(x >= 0.0)) throw ArgumentError("g2 trace values must be non-negative");
  }
}

}  // namespace wgqed
