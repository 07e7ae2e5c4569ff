#include "wgqed/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace wgqed {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Line of `key` inside `[section]`, for error messages; 0 when not found.
int find_line(const std::string& text, const std::string& section, const std::string& key) {
  std::istringstream in(text);
  std::string line, current;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[') {
      current = trim(t.substr(1, t.find(']') - 1));
      continue;
    }
    if (current == section && trim(t.substr(0, t.find('='))) == key) return n;
  }
  return 0;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, const std::string& text, std::string origin)
      : tree_(tree), text_(text), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& msg) const {
    std::ostringstream os;
    os << origin_;
    if (const int line = find_line(text_, section, key); line > 0) os << ":" << line;
    os << ": [" << section << "] " << key << ": " << msg;
    throw ConfigError(os.str());
  }

  std::optional<std::string> raw(const std::string& section, const std::string& key) {
    used_[section].insert(key);
    const auto sec = tree_.get_child_optional(section);
    if (!sec) return std::nullopt;
    const auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  double number(const std::string& section, const std::string& key, double fallback) {
    const auto v = raw(section, key);
    return v ? parse_number(section, key, *v) : fallback;
  }

  std::size_t count(const std::string& section, const std::string& key, std::size_t fallback) {
    const double v = number(section, key, static_cast<double>(fallback));
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e8) fail(section, key, "expected a positive integer");
    return static_cast<std::size_t>(v);
  }

  bool flag(const std::string& section, const std::string& key, bool fallback) {
    const auto v = raw(section, key);
    if (!v) return fallback;
    std::string s = *v;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    fail(section, key, "expected true or false, got '" + *v + "'");
  }

  std::vector<std::string> words(const std::string& section, const std::string& key) {
    const auto v = raw(section, key);
    std::vector<std::string> out;
    if (!v) return out;
    std::string item;
    std::istringstream in(*v);
    while (std::getline(in, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  std::optional<std::vector<double>> numbers(const std::string& section, const std::string& key) {
    if (!raw(section, key)) return std::nullopt;
    std::vector<double> out;
    for (const auto& w : words(section, key)) out.push_back(parse_number(section, key, w));
    return out;
  }

  double parse_number(const std::string& section, const std::string& key, const std::string& s) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
      fail(section, key, "expected a number, got '" + s + "'");
    return v;
  }

  void reject_unknown() const {
    static const std::set<std::string> sections = {"emitter", "noise", "drive", "grids", "fit"};
    for (const auto& [name, sec] : tree_) {
      if (!sections.contains(name)) {
        std::ostringstream os;
        os << origin_ << ": unknown section [" << name << "]";
        throw ConfigError(os.str());
      }
      const auto it = used_.find(name);
      for (const auto& [key, value] : sec)
        if (it == used_.end() || !it->second.contains(key)) fail(name, key, "unknown key");
    }
  }

 private:
  const pt::ptree& tree_;
  const std::string& text_;
  std::string origin_;
  std::map<std::string, std::set<std::string>> used_;
};

}  // namespace

double DrivePlan::g2_power_uw(double gamma_tot) const {
  if (g2_power > 0.0) return g2_power;
  const double rabi = rabi_from_saturation(g2_saturation, gamma_tot);
  return rabi * rabi / eta;
}

UniformGrid GridPlan::scan_grid() const { return make_grid(-scan_half_span, scan_half_span, scan_points); }

UniformGrid GridPlan::tau_grid() const {
  return tau_symmetric ? make_grid(-tau_half_span, tau_half_span, tau_points) : make_grid(0.0, tau_half_span, tau_points);
}

UniformGrid GridPlan::delta_grid() const { return make_grid(-delta_half_span, delta_half_span, delta_points); }

fit::ModelParams Config::model() const {
  fit::ModelParams m;
  m.emitter = emitter;
  m.noise = noise;
  m.eta = drive.eta;
  return m;
}

Config reference_config() {
  Config c;
  c.emitter = {0.87, 7.65, 0.0, 0.0, -0.26};
  // Table values taken as angular widths; see the README note on units.
  c.noise.sigma_short = 0.33;
  c.noise.sigma_long = 0.66;
  c.noise.sigma_irf = 0.2;
  c.noise.background = {{PortPair::tt, 0.0}, {PortPair::rr, 0.07}, {PortPair::tr, 0.0}};
  c.drive.eta = 0.11;
  c.drive.scan_powers = {5.0, 50.0, 250.0};
  c.fit.start = c.model();
  return c;
}

Config parse_config(const std::string& text, const std::string& origin) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    std::ostringstream os;
    os << origin << ":" << e.line() << ": " << e.message();
    throw ConfigError(os.str());
  }
  Reader rd(tree, text, origin);
  Config c = reference_config();
  c.source = origin;

  auto& em = c.emitter;
  em.beta = rd.number("emitter", "beta", em.beta);
  em.gamma_tot = rd.number("emitter", "gamma_tot", em.gamma_tot);
  em.gamma_d = rd.number("emitter", "gamma_d", em.gamma_d);
  em.xi = rd.number("emitter", "xi", em.xi);
  em.omega0 = angular_from_linear(rd.number("emitter", "omega0_GHz", linear_from_angular(em.omega0)));
  try {
    validate(em);
  } catch (const DomainError& e) {
    throw ConfigError(origin + ": [emitter]: " + e.what());
  }

  auto& nz = c.noise;
  nz.sigma_short = rd.number("noise", "sigma_short", nz.sigma_short);
  nz.sigma_long = rd.number("noise", "sigma_long", nz.sigma_long);
  nz.sigma_irf = rd.number("noise", "sigma_irf_ns", nz.sigma_irf);
  for (PortPair p : {PortPair::tt, PortPair::rr, PortPair::tr})
    nz.background[p] = rd.number("noise", "background_" + to_string(p), nz.background_for(p));
  try {
    nz.validate();
  } catch (const DomainError& e) {
    throw ConfigError(origin + ": [noise]: " + e.what());
  }
  c.shot.enabled = rd.flag("noise", "shot_noise", c.shot.enabled);
  c.shot.count_rate = rd.number("noise", "count_rate_per_s", c.shot.count_rate);
  c.shot.intensity_exposure = rd.number("noise", "intensity_exposure_s", c.shot.intensity_exposure);
  c.shot.g2_exposure = rd.number("noise", "g2_exposure_s", c.shot.g2_exposure);
  if (c.shot.count_rate < 0.0) rd.fail("noise", "count_rate_per_s", "must be >= 0");
  if (c.shot.intensity_exposure < 0.0) rd.fail("noise", "intensity_exposure_s", "must be >= 0");
  if (c.shot.g2_exposure < 0.0) rd.fail("noise", "g2_exposure_s", "must be >= 0");

  auto& dr = c.drive;
  dr.eta = rd.number("drive", "eta", dr.eta);
  if (!(dr.eta > 0.0)) rd.fail("drive", "eta", "must be > 0");
  if (auto v = rd.numbers("drive", "scan_powers_uW")) dr.scan_powers = *v;
  for (double p : dr.scan_powers)
    if (!(p > 0.0)) rd.fail("drive", "scan_powers_uW", "powers must be > 0");
  dr.g2_saturation = rd.number("drive", "g2_saturation", dr.g2_saturation);
  dr.g2_power = rd.number("drive", "g2_power_uW", dr.g2_power);
  if (!(dr.g2_saturation > 0.0)) rd.fail("drive", "g2_saturation", "must be > 0");
  if (dr.g2_power < 0.0) rd.fail("drive", "g2_power_uW", "must be >= 0");
  if (auto v = rd.numbers("drive", "g2_detunings_GHz")) {
    if (v->empty()) rd.fail("drive", "g2_detunings_GHz", "needs at least one value");
    dr.g2_detunings.clear();
    for (double f : *v) dr.g2_detunings.push_back(angular_from_linear(f));
  }

  auto& gr = c.grids;
  gr.scan_half_span = angular_from_linear(rd.number("grids", "scan_half_span_GHz", linear_from_angular(gr.scan_half_span)));
  gr.scan_points = rd.count("grids", "scan_points", gr.scan_points);
  gr.tau_half_span = rd.number("grids", "tau_half_span_ns", gr.tau_half_span);
  gr.tau_points = rd.count("grids", "tau_points", gr.tau_points);
  gr.tau_symmetric = rd.flag("grids", "tau_symmetric", gr.tau_symmetric);
  gr.delta_half_span =
      angular_from_linear(rd.number("grids", "delta_half_span_GHz", linear_from_angular(gr.delta_half_span)));
  gr.delta_points = rd.count("grids", "delta_points", gr.delta_points);
  if (!(gr.scan_half_span > 0.0)) rd.fail("grids", "scan_half_span_GHz", "must be > 0");
  if (!(gr.tau_half_span > 0.0)) rd.fail("grids", "tau_half_span_ns", "must be > 0");
  if (!(gr.delta_half_span > 0.0)) rd.fail("grids", "delta_half_span_GHz", "must be > 0");
  if (gr.scan_points < 2) rd.fail("grids", "scan_points", "need at least 2 points");
  if (gr.tau_points < 2) rd.fail("grids", "tau_points", "need at least 2 points");
  if (auto w = rd.words("grids", "pairs"); !w.empty()) {
    c.pairs.clear();
    for (const auto& s : w) {
      try {
        c.pairs.push_back(parse_port_pair(s));
      } catch (const Error&) {
        rd.fail("grids", "pairs", "unknown port pair '" + s + "'");
      }
    }
  }

  auto& ft = c.fit;
  ft.start = c.model();
  if (auto w = rd.words("fit", "free"); rd.raw("fit", "free")) {
    ft.free.fill(false);
    for (const auto& s : w) {
      const auto p = fit::parse_param(s);
      if (!p) rd.fail("fit", "free", "unknown parameter '" + s + "'");
      ft.free[fit::index(*p)] = true;
    }
  }
  if (auto v = rd.raw("fit", "weighting")) {
    if (*v == "poisson")
      ft.weighting = fit::Weighting::poisson;
    else if (*v == "uniform")
      ft.weighting = fit::Weighting::uniform;
    else
      rd.fail("fit", "weighting", "expected poisson or uniform");
  }
  ft.max_iterations = static_cast<int>(rd.count("fit", "max_iterations", static_cast<std::size_t>(ft.max_iterations)));
  ft.gradient_tolerance = rd.number("fit", "gradient_tolerance", ft.gradient_tolerance);
  ft.step_tolerance = rd.number("fit", "step_tolerance", ft.step_tolerance);
  const double restarts = rd.number("fit", "restarts", ft.restarts);
  if (restarts < 0.0 || restarts != std::floor(restarts)) rd.fail("fit", "restarts", "expected a non-negative integer");
  ft.restarts = static_cast<int>(restarts);
  ft.gh_order = rd.count("fit", "gh_order", ft.gh_order);
  ft.profile_at_bounds = rd.flag("fit", "profile_at_bounds", ft.profile_at_bounds);
  auto start = ft.start.to_array();
  for (fit::Param p : fit::kAllParams) {
    const std::string name(fit::param_name(p));
    const std::size_t j = fit::index(p);
    start[j] = rd.number("fit", name + "_start", start[j]);
    ft.lower[j] = rd.number("fit", name + "_lower", ft.lower[j]);
    ft.upper[j] = rd.number("fit", name + "_upper", ft.upper[j]);
    if (!(ft.lower[j] <= ft.upper[j])) rd.fail("fit", name + "_upper", "upper bound below lower bound");
  }
  ft.start = ft.start.with(start);

  rd.reject_unknown();
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  Config c = parse_config(ss.str(), path.string());
  c.source = path;
  return c;
}

}  // namespace wgqed
