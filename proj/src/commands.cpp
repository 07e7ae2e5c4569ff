#include "wgqed/commands.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "wgqed/analytic.hpp"
#include "wgqed/config.hpp"
#include "wgqed/imperfect.hpp"
#include "wgqed/simulate.hpp"
#include "wgqed/table_io.hpp"

namespace wgqed::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string param_unit(fit::Param p) {
  switch (p) {
    case fit::Param::gamma_d: return "1/ns";
    case fit::Param::eta: return "1/(ns^2 uW)";
    case fit::Param::sigma_short:
    case fit::Param::sigma_long: return "rad/ns";
    default: return "";
  }
}

void prepare(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw DataError("cannot create output directory " + out.string());
}

cplx interpolate(const ComplexSpectrum& s, double omega) {
  const UniformGrid& g = s.grid;
  const double tol = 1e-9 * g.step;
  if (omega < g.lo - tol || omega > g.hi() + tol)
    throw DataError("drive detuning " + io::format_number(linear_from_angular(omega)) +
                    " GHz lies outside the intensity scan");
  const double u = std::clamp((omega - g.lo) / g.step, 0.0, static_cast<double>(g.size() - 1));
  const auto i = std::min(static_cast<std::size_t>(u), g.size() - 2);
  const double f = u - static_cast<double>(i);
  return (1.0 - f) * s.values[i] + f * s.values[i + 1];
}

std::string describe(const fit::FitResult& r) {
  std::ostringstream os;
  os << "status: " << fit::to_string(r.status) << " after " << r.iterations << " iterations\n";
  os << "chi2 = " << r.chi2 << " over " << r.points << " points (" << r.dof << " dof, reduced " << r.reduced_chi2()
     << ")\n";
  os << std::left << std::setw(15) << "parameter" << std::setw(14) << "estimate" << "95% interval\n";
  for (fit::Param p : fit::kAllParams) {
    const std::size_t j = fit::index(p);
    os << std::setw(15) << fit::param_name(p) << std::setw(14) << r.estimate[j];
    if (r.free[j]) {
      os << "[" << r.ci_low[j] << ", " << r.ci_high[j] << "]";
      if (r.profile_ci[j]) os << " (profile)";
    } else {
      os << "fixed";
    }
    const std::string unit = param_unit(p);
    if (!unit.empty()) os << "  " << unit;
    os << '\n';
  }
  for (const auto& w : r.warnings) os << "warning: " << w << '\n';
  return os.str();
}

io::Metadata base_metadata(const Config& cfg) {
  return {{"gamma_tot", io::format_number(cfg.emitter.gamma_tot)},
          {"omega0_GHz", io::format_number(linear_from_angular(cfg.emitter.omega0))}};
}

struct Toggles {
  imperfect::Layers layers;
  bool ideal = false;
};

Toggles parse_toggles(const std::string& text) {
  Toggles t;
  t.layers = {false, false, false};
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }), item.end());
    if (item.empty() || item == "none") continue;
    if (item == "all") {
      t.layers = {true, true, true};
    } else if (item == "ideal") {
      t.ideal = true;
    } else if (item == "sd") {
      t.layers.spectral_diffusion = true;
    } else if (item == "bg") {
      t.layers.background = true;
    } else if (item == "irf") {
      t.layers.irf = true;
    } else {
      throw ConfigError("unknown toggle '" + item + "' (expected sd, bg, irf, all, none or ideal)");
    }
  }
  if (t.ideal) t.layers = {false, false, false};
  return t;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e)) return kConfigError;
  if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const IdentifiabilityError*>(&e)) return kDataError;
  if (dynamic_cast<const SpanError*>(&e) || dynamic_cast<const DegenerateError*>(&e) ||
      dynamic_cast<const SingularityError*>(&e))
    return kSpanError;
  return kFailure;
}

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const SpanError& e) {
    err << "numerical span error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

void write_params(const fs::path& path, const fit::FitResult& r) {
  json j;
  j["status"] = std::string(fit::to_string(r.status));
  j["converged"] = r.converged();
  j["iterations"] = r.iterations;
  j["chi2"] = r.chi2;
  j["reduced_chi2"] = r.reduced_chi2();
  j["points"] = r.points;
  j["dof"] = r.dof;
  json params = json::object();
  std::vector<std::string> free_names;
  for (fit::Param p : fit::kAllParams) {
    const std::size_t k = fit::index(p);
    params[std::string(fit::param_name(p))] = {{"estimate", r.estimate[k]},   {"ci_low", r.ci_low[k]},
                                               {"ci_high", r.ci_high[k]},     {"std_error", r.std_error[k]},
                                               {"free", r.free[k]},           {"at_bound", r.at_bound[k]},
                                               {"profile_ci", r.profile_ci[k]}, {"unit", param_unit(p)}};
    if (r.free[k]) free_names.emplace_back(fit::param_name(p));
  }
  j["parameters"] = params;
  const auto& m = r.params;
  j["fixed"] = {{"gamma_tot", m.emitter.gamma_tot},
                {"omega0", m.emitter.omega0},
                {"sigma_irf", m.noise.sigma_irf},
                {"background_tt", m.noise.background_for(PortPair::tt)},
                {"background_tr", m.noise.background_for(PortPair::tr)}};
  json cov = json::array();
  for (Eigen::Index a = 0; a < r.covariance.rows(); ++a) {
    json row = json::array();
    for (Eigen::Index b = 0; b < r.covariance.cols(); ++b) row.push_back(r.covariance(a, b));
    cov.push_back(row);
  }
  j["covariance"] = {{"parameters", free_names}, {"matrix", cov}};
  j["warnings"] = r.warnings;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << std::setw(2) << j << '\n';
}

fit::ModelParams read_params(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open parameter file " + path.string());
  json j;
  try {
    in >> j;
    fit::ModelParams m;
    const auto& f = j.at("fixed");
    m.emitter.gamma_tot = f.at("gamma_tot").get<double>();
    m.emitter.omega0 = f.at("omega0").get<double>();
    m.noise.sigma_irf = f.at("sigma_irf").get<double>();
    m.noise.background[PortPair::tt] = f.at("background_tt").get<double>();
    m.noise.background[PortPair::tr] = f.at("background_tr").get<double>();
    fit::ParamArray v{};
    for (fit::Param p : fit::kAllParams)
      v[fit::index(p)] = j.at("parameters").at(std::string(fit::param_name(p))).at("estimate").get<double>();
    m = m.with(v);
    validate(m.emitter);
    return m;
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": malformed parameter file: " + e.what());
  } catch (const DomainError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

int cmd_simulate(const fs::path& config, std::uint64_t seed, const fs::path& out, std::ostream& log) {
  const Config cfg = load_config(config);
  prepare(out);
  const fit::ModelParams model = cfg.model();
  const SimulationPlan plan = SimulationPlan::from_config(cfg);
  std::mt19937_64 rng(seed);
  const MeasurementSet set = simulate_measurements(model, plan, rng);

  io::Metadata meta = base_metadata(cfg);
  meta.insert(meta.begin(), {"seed", std::to_string(seed)});
  meta.emplace_back("shot_noise", plan.noisy ? "true" : "false");

  io::write_intensity(out / "intensity.csv", set.intensity_scans, meta);
  log << "wrote " << (out / "intensity.csv").string() << " (" << set.intensity_scans.size() << " scans)\n";

  const std::size_t per = plan.pairs.size();
  for (std::size_t k = 0; k < plan.g2_detunings.size(); ++k) {
    const std::vector<G2Record> recs(set.g2_traces.begin() + static_cast<std::ptrdiff_t>(k * per),
                                     set.g2_traces.begin() + static_cast<std::ptrdiff_t>((k + 1) * per));
    std::ostringstream name;
    name << "g2_w" << std::setw(3) << std::setfill('0') << k << ".csv";
    io::Metadata gm = meta;
    gm.emplace_back("saturation", io::format_number(saturation_from_rabi(model.rabi(plan.g2_power), cfg.emitter.gamma_tot)));
    io::write_g2(out / name.str(), recs, gm);
    log << "wrote " << (out / name.str()).string() << '\n';
  }

  fit::FitResult truth;
  truth.params = model;
  truth.estimate = truth.ci_low = truth.ci_high = model.to_array();
  truth.free.fill(false);
  truth.std_error.fill(0.0);
  write_params(out / "truth.json", truth);
  return kOk;
}

int cmd_fit(const fs::path& data, const fs::path& config, const fs::path& out, std::ostream& log) {
  const Config cfg = load_config(config);
  const MeasurementSet set = io::read_measurement_set(data);
  prepare(out);
  if (set.gamma_tot_fixed > 0.0 && std::abs(set.gamma_tot_fixed - cfg.emitter.gamma_tot) > 1e-9 * cfg.emitter.gamma_tot)
    log << "note: data were generated with gamma_tot = " << set.gamma_tot_fixed << "; fitting with the configured "
        << cfg.emitter.gamma_tot << '\n';
  const fit::FitResult res = fit::fit(set, cfg.fit);
  write_params(out / "fit_result.json", res);
  const std::string report = describe(res);
  std::ofstream(out / "fit_report.txt") << report;
  log << report;
  return res.converged() ? kOk : kNotConverged;
}

int cmd_reconstruct(const fs::path& data, const fs::path& params, const fs::path& out, std::ostream& log,
                    reconstruct::Combination combination) {
  const MeasurementSet set = io::read_measurement_set(data);
  const fit::ModelParams p = read_params(params);
  if (set.intensity_scans.empty()) throw DataError(data.string() + ": reconstruction needs intensity.csv");
  prepare(out);

  // The weakest drive is closest to the single-photon limit.
  const auto weakest = std::min_element(set.intensity_scans.begin(), set.intensity_scans.end(),
                                        [](const auto& a, const auto& b) { return a.power_uw < b.power_uw; });
  const cplx z = analytic::fano_z(p.emitter.xi);
  reconstruct::SingleSpectra single;
  try {
    single = reconstruct::reconstruct_single(weakest->intensity, weakest->omega, p.emitter.beta, z);
  } catch (const SpanError& e) {
    throw SpanError(std::string(e.what()) + " (hint: widen scan_half_span_GHz so the dip decays at the edges)");
  }
  io::write_spectrum(out / "response_G.csv", single.response);
  io::write_spectrum(out / "single_t.csv", single.t);
  io::write_spectrum(out / "single_r.csv", single.r);
  log << "wrote single-photon spectra from the " << weakest->power_uw << " uW scan\n";

  // Traces grouped by drive frequency.
  std::map<double, std::map<PortPair, const G2Record*>> by_omega;
  for (const auto& rec : set.g2_traces) {
    const PortPair key = rec.trace.pair == PortPair::rt ? PortPair::tr : rec.trace.pair;
    by_omega[rec.omega][key] = &rec;
  }
  if (by_omega.empty()) {
    log << "notice: no g2 traces; two-photon reconstruction skipped\n";
    return kOk;
  }

  std::vector<double> omegas;
  std::vector<std::vector<double>> rows;
  UniformGrid tau;
  io::CsvTable table;
  table.header = {"detuning_GHz", "tau_ns", "re_T"};
  for (const auto& [omega, traces] : by_omega) {
    for (PortPair need : {PortPair::tt, PortPair::rr, PortPair::tr})
      if (!traces.contains(need))
        throw DataError("drive detuning " + io::format_number(linear_from_angular(omega)) + " GHz lacks a " +
                        to_string(need) + " trace");
    const cplx t = interpolate(single.t, omega);
    const cplx r = interpolate(single.r, omega);
    const auto re = reconstruct::reconstruct_t_real(traces.at(PortPair::tt)->trace, traces.at(PortPair::rr)->trace,
                                                    traces.at(PortPair::tr)->trace, t, r, combination);
    const UniformGrid& g = traces.at(PortPair::tt)->trace.tau;
    if (!omegas.empty() && !g.same_as(tau)) throw DataError("g2 traces at different drive detunings use different delay grids");
    tau = g;
    for (std::size_t i = 0; i < g.size(); ++i)
      table.rows.push_back({io::format_number(linear_from_angular(omega)), io::format_number(g[i]),
                            io::format_number(re[i])});
    omegas.push_back(omega);
    rows.push_back(re);
  }
  io::write_csv(out / "t_real.csv", table);
  log << "wrote Re T(tau) at " << omegas.size() << " drive detuning(s)\n";

  if (omegas.size() < 2) {
    log << "notice: data hold a single drive frequency; the Kramers-Kronig step over omega and the sector "
           "inversion are skipped\n";
    return kOk;
  }
  const UniformGrid wgrid = make_grid(omegas.front(), omegas.back(), omegas.size());
  for (std::size_t i = 0; i < omegas.size(); ++i)
    if (std::abs(omegas[i] - wgrid[i]) > 1e-6 * wgrid.step)
      throw DataError("drive detunings of the g2 files are not uniformly spaced");
  std::vector<double> field;
  for (const auto& row : rows) field.insert(field.end(), row.begin(), row.end());
  reconstruct::TField tf;
  try {
    tf = reconstruct::complete_t(field, wgrid, tau);
  } catch (const SpanError& e) {
    throw SpanError(std::string(e.what()) + " (hint: scan the drive over a wider detuning range, ~5 gamma_tot)");
  }
  io::CsvTable ft;
  ft.header = {"detuning_GHz", "tau_ns", "re_T", "im_T"};
  for (std::size_t i = 0; i < wgrid.size(); ++i)
    for (std::size_t j = 0; j < tau.size(); ++j)
      ft.rows.push_back({io::format_number(linear_from_angular(wgrid[i])), io::format_number(tau[j]),
                         io::format_number(tf.at(i, j).real()), io::format_number(tf.at(i, j).imag())});
  io::write_csv(out / "t_field.csv", ft);

  std::size_t centre = 0;
  for (std::size_t i = 1; i < wgrid.size(); ++i)
    if (std::abs(wgrid[i] - p.emitter.omega0) < std::abs(wgrid[centre] - p.emitter.omega0)) centre = i;
  const double span = 5.0 * p.emitter.gamma_tot;
  const auto row = tf.row(centre);
  TwoPhotonSector sector;
  try {
    sector = reconstruct::invert_to_sector(wgrid[centre], row, tau, make_grid(-span, span, 201));
  } catch (const SpanError& e) {
    throw SpanError(std::string(e.what()) + " (hint: record the correlations over a longer delay window)");
  }
  io::write_sector(out / "sector.csv", sector);
  log << "wrote two-photon sector at " << linear_from_angular(wgrid[centre]) << " GHz\n";
  return kOk;
}

int cmd_predict(const fs::path& config, const std::string& toggles, const fs::path& out, std::ostream& log) {
  const Config cfg = load_config(config);
  const Toggles tg = parse_toggles(toggles);
  prepare(out);
  EmitterParams em = cfg.emitter;
  if (tg.ideal) {
    em.xi = 0.0;
    em.gamma_d = 0.0;
  }
  NoiseModel noise = cfg.noise;
  const UniformGrid tau = cfg.grids.tau_grid();
  const double power = cfg.drive.g2_power_uw(em.gamma_tot);
  const cplx rabi(std::sqrt(cfg.drive.eta * power), 0.0);

  io::CsvTable weak, model, kernel, sector;
  weak.metadata = model.metadata = base_metadata(cfg);
  weak.metadata.emplace_back("toggles", toggles);
  model.metadata = weak.metadata;
  model.metadata.emplace_back("saturation", io::format_number(saturation_from_rabi(rabi, em.gamma_tot)));
  weak.header = model.header = {"detuning_GHz", "pair", "tau_ns", "g2"};
  kernel.header = {"detuning_GHz", "tau_ns", "re_T", "im_T", "re_Tbar", "im_Tbar"};
  sector.header = {"detuning_GHz", "delta_GHz", "re_T", "im_T"};

  imperfect::ModelOptions opt;
  opt.layers = tg.layers;
  std::vector<std::string> warnings;
  opt.warnings = &warnings;
  NoiseModel bar_noise = noise;
  if (!tg.layers.spectral_diffusion) bar_noise.sigma_long = 0.0;
  if (!tg.layers.irf) bar_noise.sigma_irf = 0.0;

  std::ostringstream summary;
  summary << std::setprecision(6);
  const UniformGrid delta = cfg.grids.delta_grid();
  for (double omega : cfg.drive.g2_detunings) {
    const std::string f = io::format_number(linear_from_angular(omega));
    for (PortPair pair : cfg.pairs) {
      bool weak_ok = true;
      for (std::size_t i = 0; i < tau.size() && weak_ok; ++i) {
        try {
          weak.rows.push_back({f, to_string(pair), io::format_number(tau[i]),
                               io::format_number(analytic::g2_weak(pair, omega, tau[i], em))});
        } catch (const DegenerateError&) {
          weak_ok = false;
          log << "notice: weak-drive g2_" << to_string(pair) << " undefined at " << f << " GHz (port amplitude vanishes)\n";
        }
      }
      const auto g = imperfect::imperfect_g2(pair, omega, rabi, tau, em, noise, opt);
      for (std::size_t i = 0; i < tau.size(); ++i)
        model.rows.push_back({f, to_string(pair), io::format_number(tau[i]), io::format_number(g.values[i])});
      const double g0 = imperfect::imperfect_g2(pair, omega, rabi, make_grid(0.0, tau.step * 4, 5), em, noise, opt).values[0];
      summary << "g2_" << to_string(pair) << "(0) at " << f << " GHz: model " << g0;
      if (weak_ok) summary << ", weak-drive " << analytic::g2_weak(pair, omega, 0.0, em);
      summary << '\n';
    }
    const auto tbar = imperfect::predicted_tbar(omega, tau, em, bar_noise);
    for (std::size_t i = 0; i < tau.size(); ++i) {
      const cplx t = analytic::tau_kernel(omega, tau[i], em);
      kernel.rows.push_back({f, io::format_number(tau[i]), io::format_number(t.real()), io::format_number(t.imag()),
                             io::format_number(tbar[i].real()), io::format_number(tbar[i].imag())});
    }
    for (std::size_t i = 0; i < delta.size(); ++i) {
      const cplx s = analytic::sector_T(omega, delta[i], em);
      sector.rows.push_back(
          {f, io::format_number(linear_from_angular(delta[i])), io::format_number(s.real()), io::format_number(s.imag())});
    }
  }
  io::write_csv(out / "g2_weak.csv", weak);
  io::write_csv(out / "g2_model.csv", model);
  io::write_csv(out / "t_kernel.csv", kernel);
  io::write_csv(out / "sector.csv", sector);

  io::CsvTable inten;
  inten.metadata = base_metadata(cfg);
  inten.header = {"power_uW", "detuning_GHz", "I_t"};
  const UniformGrid grid = cfg.grids.scan_grid();
  const double sd = tg.layers.spectral_diffusion ? noise.sigma_short : 0.0;
  for (double p : cfg.drive.scan_powers) {
    const auto v = imperfect::averaged_intensity_scan(Port::t, grid, cplx(std::sqrt(cfg.drive.eta * p), 0.0), em, sd);
    for (std::size_t i = 0; i < grid.size(); ++i)
      inten.rows.push_back({io::format_number(p), io::format_number(linear_from_angular(grid[i])), io::format_number(v[i])});
  }
  io::write_csv(out / "intensity_model.csv", inten);

  std::sort(warnings.begin(), warnings.end());
  warnings.erase(std::unique(warnings.begin(), warnings.end()), warnings.end());
  for (const auto& w : warnings) summary << "warning: " << w << '\n';
  std::ofstream(out / "summary.txt") << summary.str();
  log << summary.str();
  return kOk;
}

}  // namespace wgqed::cli
