#include "wgqed/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "wgqed/imperfect.hpp"

namespace wgqed::fit {

namespace {

constexpr double kChi2Quantile95 = 3.841458820694124;  // one degree of freedom
constexpr double kZ95 = 1.959963984540054;

// The model sees the diffusion widths only through sigma^2, so the optimiser
// works in that variable; in sigma itself the gradient vanishes at zero.
bool squared(std::size_t j) { return j == index(Param::sigma_short) || j == index(Param::sigma_long); }

ParamArray to_internal(ParamArray x) {
  for (std::size_t j = 0; j < kParamCount; ++j)
    if (squared(j)) x[j] = x[j] * std::abs(x[j]);
  return x;
}

ParamArray to_external(ParamArray u) {
  for (std::size_t j = 0; j < kParamCount; ++j)
    if (squared(j)) u[j] = std::sqrt(std::max(u[j], 0.0));
  return u;
}

struct Block {
  bool intensity = true;
  std::size_t index = 0;
  std::size_t offset = 0;
  std::size_t count = 0;
};

std::vector<Block> layout(const MeasurementSet& data) {
  std::vector<Block> blocks;
  std::size_t off = 0;
  for (std::size_t i = 0; i < data.intensity_scans.size(); ++i) {
    const auto n = data.intensity_scans[i].intensity.size();
    blocks.push_back({true, i, off, n});
    off += n;
  }
  for (std::size_t i = 0; i < data.g2_traces.size(); ++i) {
    const auto n = data.g2_traces[i].trace.values.size();
    blocks.push_back({false, i, off, n});
    off += n;
  }
  return blocks;
}

std::size_t total_points(const std::vector<Block>& blocks) {
  return blocks.empty() ? 0 : blocks.back().offset + blocks.back().count;
}

// Runs fn(i) for i < n, spread over the available cores.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<double> point_sigmas(const MeasurementSet& data, Weighting weighting) {
  const auto blocks = layout(data);
  std::vector<double> sigma(total_points(blocks), 1.0);
  if (weighting == Weighting::uniform) return sigma;
  for (const Block& b : blocks) {
    const std::vector<double>& values =
        b.intensity ? data.intensity_scans[b.index].intensity : data.g2_traces[b.index].trace.values;
    const std::vector<double>& counts =
        b.intensity ? data.intensity_scans[b.index].counts : data.g2_traces[b.index].coincidences;
    if (counts.size() != values.size()) continue;
    double sc = 0.0, sv = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      sc += counts[i];
      sv += values[i];
    }
    if (!(sc > 0.0 && sv > 0.0)) continue;
    const double scale = sc / sv;  // counts per unit of the measured quantity
    for (std::size_t i = 0; i < values.size(); ++i) sigma[b.offset + i] = std::sqrt(std::max(counts[i], 1.0)) / scale;
  }
  return sigma;
}

std::vector<double> observed(const MeasurementSet& data) {
  std::vector<double> out;
  for (const auto& s : data.intensity_scans) out.insert(out.end(), s.intensity.begin(), s.intensity.end());
  for (const auto& g : data.g2_traces) out.insert(out.end(), g.trace.values.begin(), g.trace.values.end());
  return out;
}

// Residual evaluator with the data-dependent pieces computed once.
class Problem {
 public:
  Problem(const MeasurementSet& data, const ModelParams& base, Weighting weighting, std::size_t gh_order)
      : data_(data), base_(base), sigma_(point_sigmas(data, weighting)), obs_(observed(data)), gh_order_(gh_order) {}

  /// Residuals at internal coordinates (see to_internal).
  Eigen::VectorXd residuals(const ParamArray& values) const {
    const auto model = model_values(data_, base_.with(to_external(values)), gh_order_);
    Eigen::VectorXd r(static_cast<Eigen::Index>(model.size()));
    for (std::size_t i = 0; i < model.size(); ++i) r(static_cast<Eigen::Index>(i)) = (model[i] - obs_[i]) / sigma_[i];
    return r;
  }

  std::size_t points() const { return obs_.size(); }
  const ModelParams& base() const { return base_; }

 private:
  const MeasurementSet& data_;
  ModelParams base_;
  std::vector<double> sigma_;
  std::vector<double> obs_;
  std::size_t gh_order_;
};

struct Bounds {
  ParamArray lower;
  ParamArray upper;
};

double typical_scale(std::size_t j, const Bounds& b, double x) {
  const double width = b.upper[j] - b.lower[j];
  return std::max({std::abs(x), 1e-2 * std::min(width, 1.0), 1e-3});
}

Eigen::MatrixXd jacobian(const Problem& prob, const ParamArray& x, const std::vector<std::size_t>& cols,
                         const Bounds& b, const Eigen::VectorXd* r0) {
  Eigen::MatrixXd J(static_cast<Eigen::Index>(prob.points()), static_cast<Eigen::Index>(cols.size()));
  Eigen::VectorXd base;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const std::size_t j = cols[c];
    const double h = 1e-5 * typical_scale(j, b, x[j]);
    ParamArray xp = x, xm = x;
    if (x[j] - h >= b.lower[j] && x[j] + h <= b.upper[j]) {
      xp[j] += h;
      xm[j] -= h;
      J.col(static_cast<Eigen::Index>(c)) = (prob.residuals(xp) - prob.residuals(xm)) / (2.0 * h);
      continue;
    }
    // Second-order one-sided difference pointing away from the bound.
    const double s = x[j] - h < b.lower[j] ? 1.0 : -1.0;
    if (base.size() == 0) base = r0 ? *r0 : prob.residuals(x);
    xp[j] += s * h;
    xm[j] += 2.0 * s * h;
    J.col(static_cast<Eigen::Index>(c)) = s * (-3.0 * base + 4.0 * prob.residuals(xp) - prob.residuals(xm)) / (2.0 * h);
  }
  return J;
}

struct LmOutcome {
  ParamArray x{};
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  double cost = 0.0;
  int iterations = 0;
  FitStatus status = FitStatus::converged;
};

struct LmSettings {
  double gtol = 1e-8;
  double xtol = 1e-8;
  int max_iterations = 200;
};

LmOutcome levenberg_marquardt(const Problem& prob, ParamArray x, const std::vector<std::size_t>& cols,
                              const Bounds& b, const LmSettings& opt) {
  for (std::size_t j : cols) x[j] = std::clamp(x[j], b.lower[j], b.upper[j]);
  LmOutcome out;
  out.x = x;
  out.r = prob.residuals(x);
  out.cost = out.r.squaredNorm();
  const auto n = static_cast<Eigen::Index>(cols.size());
  if (n == 0) return out;
  out.J = jacobian(prob, x, cols, b, &out.r);

  double lambda = 1e-3;
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    out.iterations = iter + 1;
    const Eigen::MatrixXd A = out.J.transpose() * out.J;
    const Eigen::VectorXd g = out.J.transpose() * out.r;

    // Free variables resting on a bound with the gradient pushing outward stay put.
    std::vector<bool> active(cols.size(), false);
    double gmax = 0.0;
    const double rnorm = std::sqrt(out.cost);
    for (Eigen::Index c = 0; c < n; ++c) {
      const std::size_t j = cols[static_cast<std::size_t>(c)];
      const double tol = 1e-12 * typical_scale(j, b, out.x[j]);
      active[static_cast<std::size_t>(c)] =
          (out.x[j] <= b.lower[j] + tol && g(c) > 0.0) || (out.x[j] >= b.upper[j] - tol && g(c) < 0.0);
      if (active[static_cast<std::size_t>(c)]) continue;
      const double jn = out.J.col(c).norm();
      if (jn > 0.0 && rnorm > 0.0) gmax = std::max(gmax, std::abs(g(c)) / (jn * rnorm));
    }
    if (gmax <= opt.gtol || out.cost == 0.0) {
      out.status = FitStatus::converged;
      return out;
    }

    std::vector<Eigen::Index> idx;
    for (Eigen::Index c = 0; c < n; ++c)
      if (!active[static_cast<std::size_t>(c)]) idx.push_back(c);
    const auto m = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd Ar(m, m);
    Eigen::VectorXd gr(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      gr(a) = g(idx[static_cast<std::size_t>(a)]);
      for (Eigen::Index c = 0; c < m; ++c) Ar(a, c) = A(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(c)]);
    }
    const double dmax = Ar.diagonal().maxCoeff();

    bool accepted = false;
    ParamArray xn = out.x;
    Eigen::VectorXd rn;
    double cn = 0.0;
    for (int attempt = 0; attempt < 30 && !accepted; ++attempt) {
      Eigen::MatrixXd M = Ar;
      for (Eigen::Index a = 0; a < m; ++a) M(a, a) += lambda * std::max(Ar(a, a), 1e-12 * dmax);
      const Eigen::VectorXd step = M.ldlt().solve(-gr);
      xn = out.x;
      for (Eigen::Index a = 0; a < m; ++a) {
        const std::size_t j = cols[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
        xn[j] = std::clamp(out.x[j] + step(a), b.lower[j], b.upper[j]);
      }
      bool ok = step.allFinite();
      if (ok) {
        try {
          rn = prob.residuals(xn);
          cn = rn.squaredNorm();
          ok = std::isfinite(cn);
        } catch (const Error&) {
          ok = false;
        }
      }
      if (ok && cn < out.cost) {
        accepted = true;
        lambda = std::max(lambda / 3.0, 1e-12);
      } else {
        lambda *= 4.0;
      }
    }
    if (!accepted) {
      out.status = FitStatus::stalled;
      return out;
    }

    double dx = 0.0, xs = 0.0;
    for (std::size_t j : cols) {
      const double s = typical_scale(j, b, out.x[j]);
      dx = std::max(dx, std::abs(xn[j] - out.x[j]) / s);
      xs = std::max(xs, std::abs(out.x[j]) / s);
    }
    const double dcost = out.cost - cn;
    out.x = xn;
    out.r = rn;
    out.cost = cn;
    out.J = jacobian(prob, out.x, cols, b, &out.r);
    if (dx <= opt.xtol * (xs + opt.xtol) || dcost <= 1e-14 * cn) {
      out.status = FitStatus::converged;
      return out;
    }
  }
  out.status = FitStatus::max_iterations;
  return out;
}

void check_identifiable(const MeasurementSet& data, const FitConfig& cfg) {
  auto is_free = [&](Param p) { return cfg.free[index(p)]; };
  std::set<double> powers;
  for (const auto& s : data.intensity_scans) powers.insert(s.power_uw);
  if (is_free(Param::eta) && powers.size() < 2)
    throw IdentifiabilityError("eta is free but the intensity scans cover " + std::to_string(powers.size()) +
                               " distinct power(s); beta and eta are degenerate without at least two powers");
  bool has_rr = false;
  for (const auto& g : data.g2_traces) has_rr = has_rr || g.trace.pair == PortPair::rr;
  if (is_free(Param::background_rr) && !has_rr)
    throw IdentifiabilityError("background_rr is free but the data contain no rr correlation trace");
  if (is_free(Param::sigma_long) && data.g2_traces.empty())
    throw IdentifiabilityError("sigma_long is free but the data contain no correlation traces");
  if (is_free(Param::sigma_short) && data.intensity_scans.empty())
    throw IdentifiabilityError("sigma_short is free but the data contain no intensity scans");
}

void check_rank(const Eigen::MatrixXd& J, const std::vector<std::size_t>& cols) {
  Eigen::MatrixXd Jn = J;
  for (Eigen::Index c = 0; c < Jn.cols(); ++c) {
    const double nrm = Jn.col(c).norm();
    if (nrm == 0.0)
      throw IdentifiabilityError(std::string("the data carry no information on ") +
                                 std::string(param_name(static_cast<Param>(cols[static_cast<std::size_t>(c)]))) +
                                 " at the starting point");
    Jn.col(c) /= nrm;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Jn, Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) > 1e-7 * s(0)) return;
  const Eigen::VectorXd v = svd.matrixV().col(s.size() - 1);
  std::ostringstream os;
  os << "rank-deficient Jacobian; degenerate combination involves";
  for (Eigen::Index c = 0; c < v.size(); ++c)
    if (std::abs(v(c)) > 0.2) os << ' ' << param_name(static_cast<Param>(cols[static_cast<std::size_t>(c)]));
  throw IdentifiabilityError(os.str());
}

}  // namespace

std::string_view param_name(Param p) {
  switch (p) {
    case Param::beta: return "beta";
    case Param::gamma_d: return "gamma_d";
    case Param::xi: return "xi";
    case Param::eta: return "eta";
    case Param::sigma_short: return "sigma_short";
    case Param::sigma_long: return "sigma_long";
    case Param::background_rr: return "background_rr";
  }
  return "?";
}

std::optional<Param> parse_param(std::string_view name) {
  for (Param p : kAllParams)
    if (param_name(p) == name) return p;
  return std::nullopt;
}

std::string_view to_string(FitStatus s) {
  switch (s) {
    case FitStatus::converged: return "converged";
    case FitStatus::max_iterations: return "max_iterations";
    case FitStatus::stalled: return "stalled";
  }
  return "?";
}

ParamArray ModelParams::to_array() const {
  return {emitter.beta, emitter.gamma_d, emitter.xi, eta, noise.sigma_short, noise.sigma_long,
          noise.background_for(PortPair::rr)};
}

ModelParams ModelParams::with(const ParamArray& v) const {
  ModelParams out = *this;
  out.emitter.beta = v[index(Param::beta)];
  out.emitter.gamma_d = v[index(Param::gamma_d)];
  out.emitter.xi = v[index(Param::xi)];
  out.eta = v[index(Param::eta)];
  out.noise.sigma_short = v[index(Param::sigma_short)];
  out.noise.sigma_long = v[index(Param::sigma_long)];
  out.noise.background[PortPair::rr] = v[index(Param::background_rr)];
  return out;
}

cplx ModelParams::rabi(double power_uw) const {
  if (power_uw < 0.0 || eta < 0.0) throw DomainError("drive power and eta must be non-negative");
  return {std::sqrt(eta * power_uw), 0.0};
}

std::vector<double> model_values(const MeasurementSet& data, const ModelParams& params, std::size_t gh_order) {
  validate(params.emitter);
  params.noise.validate();
  const auto blocks = layout(data);
  std::vector<double> out(total_points(blocks));
  parallel_for(blocks.size(), [&](std::size_t k) {
    const Block& b = blocks[k];
    try {
      std::vector<double> v;
      if (b.intensity) {
        const auto& s = data.intensity_scans[b.index];
        v = imperfect::averaged_intensity_scan(Port::t, s.omega, params.rabi(s.power_uw), params.emitter,
                                               params.noise.sigma_short, gh_order);
      } else {
        const auto& g = data.g2_traces[b.index];
        imperfect::ModelOptions opt;
        opt.gh_order = gh_order;
        v = imperfect::imperfect_g2(g.trace.pair, g.omega, params.rabi(g.power_uw), g.trace.tau, params.emitter,
                                    params.noise, opt)
                .values;
      }
      std::copy(v.begin(), v.end(), out.begin() + static_cast<std::ptrdiff_t>(b.offset));
    } catch (const Error& e) {
      std::ostringstream os;
      if (b.intensity)
        os << "intensity scan " << b.index << " (points " << b.offset << ".." << b.offset + b.count - 1
           << "): " << e.what();
      else
        os << "g2 trace " << b.index << " (" << to_string(data.g2_traces[b.index].trace.pair) << ", points "
           << b.offset << ".." << b.offset + b.count - 1 << "): " << e.what();
      throw DataError(os.str());
    }
  });
  return out;
}

std::vector<double> model_residuals(const MeasurementSet& data, const ModelParams& params, Weighting weighting,
                                    std::size_t gh_order) {
  const Problem prob(data, params, weighting, gh_order);
  const Eigen::VectorXd r = prob.residuals(to_internal(params.to_array()));
  return {r.data(), r.data() + r.size()};
}

Eigen::MatrixXd residual_jacobian(const MeasurementSet& data, const ModelParams& params, const FitConfig& config) {
  const Problem prob(data, params, config.weighting, config.gh_order);
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < kParamCount; ++j)
    if (config.free[j]) cols.push_back(j);
  const ParamArray x = params.to_array();
  Eigen::MatrixXd J = jacobian(prob, to_internal(x), cols, {to_internal(config.lower), to_internal(config.upper)}, nullptr);
  for (std::size_t c = 0; c < cols.size(); ++c)
    if (squared(cols[c])) J.col(static_cast<Eigen::Index>(c)) *= 2.0 * x[cols[c]];
  return J;
}

FitResult fit(const MeasurementSet& data, const FitConfig& config) {
  check_identifiable(data, config);
  for (std::size_t j = 0; j < kParamCount; ++j)
    if (squared(j) && config.free[j] && config.lower[j] < 0.0)
      throw ConfigError(std::string("lower bound of ") + std::string(param_name(static_cast<Param>(j))) +
                        " must be >= 0");
  const Bounds ext_bounds{config.lower, config.upper};
  const Bounds bounds{to_internal(config.lower), to_internal(config.upper)};
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < kParamCount; ++j) {
    if (!config.free[j]) continue;
    if (!(config.lower[j] <= config.upper[j]))
      throw ConfigError(std::string("empty bounds for ") + std::string(param_name(static_cast<Param>(j))));
    cols.push_back(j);
  }
  const Problem prob(data, config.start, config.weighting, config.gh_order);
  if (prob.points() <= cols.size())
    throw IdentifiabilityError("fewer data points than free parameters");

  ParamArray x0 = to_internal(config.start.to_array());
  for (std::size_t j : cols) x0[j] = std::clamp(x0[j], bounds.lower[j], bounds.upper[j]);
  if (!cols.empty()) check_rank(jacobian(prob, x0, cols, bounds, nullptr), cols);

  const LmSettings settings{config.gradient_tolerance, config.step_tolerance, config.max_iterations};
  LmOutcome best = levenberg_marquardt(prob, x0, cols, bounds, settings);
  std::mt19937_64 rng(0x5eed);
  for (int k = 0; k < config.restarts; ++k) {
    ParamArray xr = x0;
    for (std::size_t j : cols) {
      const double lo = bounds.lower[j], hi = bounds.upper[j];
      const double span = std::min(hi - lo, 4.0 * typical_scale(j, bounds, x0[j]));
      std::uniform_real_distribution<double> u(-0.5 * span, 0.5 * span);
      xr[j] = std::clamp(x0[j] + u(rng), lo, hi);
    }
    try {
      LmOutcome trial = levenberg_marquardt(prob, xr, cols, bounds, settings);
      if (trial.cost < best.cost) best = std::move(trial);
    } catch (const Error&) {
    }
  }

  const ParamArray est = to_external(best.x);
  FitResult res;
  res.free = config.free;
  res.estimate = est;
  res.params = config.start.with(est);
  res.chi2 = best.cost;
  res.residual_norm = std::sqrt(best.cost);
  res.points = prob.points();
  res.dof = prob.points() - cols.size();
  res.iterations = best.iterations;
  res.status = best.status;
  res.ci_low = res.ci_high = est;
  res.std_error.fill(0.0);

  const auto n = static_cast<Eigen::Index>(cols.size());
  if (n == 0) return res;

  const double s2 = config.weighting == Weighting::uniform ? res.reduced_chi2() : 1.0;
  Eigen::MatrixXd J = best.J;
  for (Eigen::Index c = 0; c < n; ++c)
    if (squared(cols[static_cast<std::size_t>(c)])) J.col(c) *= 2.0 * est[cols[static_cast<std::size_t>(c)]];
  const Eigen::MatrixXd A = J.transpose() * J;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  svd.setThreshold(1e-12);
  if (svd.rank() < n) res.warnings.push_back("normal matrix is singular at the optimum; covariance is a pseudo-inverse");
  res.covariance = s2 * svd.solve(Eigen::MatrixXd::Identity(n, n));
  res.covariance = 0.5 * (res.covariance + res.covariance.transpose()).eval();

  for (Eigen::Index c = 0; c < n; ++c) {
    const std::size_t j = cols[static_cast<std::size_t>(c)];
    const double se = std::sqrt(std::max(res.covariance(c, c), 0.0));
    res.std_error[j] = se;
    res.ci_low[j] = std::max(est[j] - kZ95 * se, ext_bounds.lower[j]);
    res.ci_high[j] = std::min(est[j] + kZ95 * se, ext_bounds.upper[j]);
    const double tol = 1e-6 * typical_scale(j, ext_bounds, est[j]);
    const bool at_lo = est[j] <= ext_bounds.lower[j] + tol;
    const bool at_hi = est[j] >= ext_bounds.upper[j] - tol;
    res.at_bound[j] = at_lo || at_hi;
    if (res.at_bound[j])
      res.warnings.push_back(std::string(param_name(static_cast<Param>(j))) + " is stuck at its " +
                             (at_lo ? "lower" : "upper") + " bound");
  }

  // Profile likelihood for parameters on a bound: walk inward from the bound
  // until chi2 rises by the 95% quantile, re-optimising the others.
  const double threshold = kChi2Quantile95 * s2;
  for (Eigen::Index c = 0; c < n; ++c) {
    const std::size_t j = cols[static_cast<std::size_t>(c)];
    if (!res.at_bound[j] || !config.profile_at_bounds) continue;
    const bool at_lo = est[j] <= ext_bounds.lower[j] + 1e-6 * typical_scale(j, ext_bounds, est[j]);
    const double edge = at_lo ? ext_bounds.lower[j] : ext_bounds.upper[j];
    const double dir = at_lo ? 1.0 : -1.0;
    const double room = ext_bounds.upper[j] - ext_bounds.lower[j];
    std::vector<std::size_t> others;
    for (std::size_t k : cols)
      if (k != j) others.push_back(k);
    const LmSettings inner{1e-5, 1e-5, 20};
    auto rise = [&](double d) {
      ParamArray xs = est;
      xs[j] = edge + dir * d;
      xs = to_internal(xs);
      try {
        return levenberg_marquardt(prob, xs, others, bounds, inner).cost - best.cost;
      } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    double lo_d = 0.0;
    double hi_d = std::max(res.std_error[j] > 0.0 ? kZ95 * res.std_error[j] : 0.0, 1e-3 * std::min(room, 1.0));
    bool bracketed = false;
    for (int k = 0; k < 30 && hi_d <= room; ++k) {
      if (rise(hi_d) >= threshold) {
        bracketed = true;
        break;
      }
      lo_d = hi_d;
      hi_d *= 2.0;
    }
    double d = room;
    if (bracketed) {
      for (int k = 0; k < 8; ++k) {
        const double mid = 0.5 * (lo_d + hi_d);
        (rise(mid) >= threshold ? hi_d : lo_d) = mid;
      }
      d = 0.5 * (lo_d + hi_d);
    }
    res.profile_ci[j] = true;
    if (at_lo) {
      res.ci_low[j] = edge;
      res.ci_high[j] = std::min(edge + d, ext_bounds.upper[j]);
    } else {
      res.ci_high[j] = edge;
      res.ci_low[j] = std::max(edge - d, ext_bounds.lower[j]);
    }
  }
  return res;
}

std::vector<SaturationPoint> saturation_curve(std::span<const double> powers_uw, const ModelParams& params) {
  std::vector<SaturationPoint> out;
  out.reserve(powers_uw.size());
  for (double p : powers_uw) {
    if (!(p > 0.0)) throw ArgumentError("saturation_curve: powers must be positive");
    const cplx rabi = params.rabi(p);
    out.push_back({p, saturation_from_rabi(rabi, params.emitter.gamma_tot),
                   imperfect::averaged_intensity(Port::t, params.emitter.omega0, rabi, params.emitter,
                                                 params.noise.sigma_short)});
  }
  return out;
}

}  // namespace wgqed::fit
