#include "wgqed/dynamics.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>

namespace wgqed::dynamics {

namespace {

const Mat2& lowering() {
  static const Mat2 m = (Mat2() << 0, 1, 0, 0).finished();
  return m;
}
const Mat2& raising() {
  static const Mat2 m = (Mat2() << 0, 0, 1, 0).finished();
  return m;
}
const Mat2& number() {
  static const Mat2 m = (Mat2() << 0, 0, 0, 1).finished();
  return m;
}

Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

// vec(c rho c^+) - (c^+c rho + rho c^+c)/2 as a superoperator.
Mat4 dissipator(const Mat2& c) {
  const Mat2 id = Mat2::Identity();
  const Mat2 cdc = c.adjoint() * c;
  return kron(c.conjugate(), c) - 0.5 * kron(id, cdc) - 0.5 * kron(cdc.transpose(), id);
}

Vec4 vec(const Mat2& m) { return Vec4(m(0, 0), m(1, 0), m(0, 1), m(1, 1)); }

Mat2 unvec(const Vec4& v) {
  Mat2 m;
  m << v(0), v(2), v(1), v(3);
  return m;
}

// Tr{A X} for vectorised X.
cplx trace_with(const Mat2& A, const Vec4& x) {
  cplx acc = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) acc += A(j, i) * x(i + 2 * j);
  return acc;
}

}  // namespace

Vec4 DensityMatrix::vectorised() const { return vec(rho); }

DensityMatrix DensityMatrix::from_vector(const Vec4& v) { return DensityMatrix{unvec(v)}; }

double Liouvillian::trace_defect() const {
  double worst = 0.0;
  for (int c = 0; c < 4; ++c) worst = std::max(worst, std::abs(matrix(0, c) + matrix(3, c)));
  return worst;
}

Liouvillian build_liouvillian(double omega, cplx rabi, const EmitterParams& params) {
  validate(params);
  const Mat2 id = Mat2::Identity();
  const double detuning = omega - params.omega0;
  const cplx i(0.0, 1.0);
  const Mat2 H = -detuning * number() + i * (rabi * raising() - std::conj(rabi) * lowering());

  Liouvillian L;
  L.params = params;
  L.drive = DriveSpec::create(omega, rabi, params.gamma_tot);
  L.matrix = -i * (kron(id, H) - kron(H.transpose(), id)) + params.gamma_tot * dissipator(lowering()) +
             2.0 * params.gamma_d * dissipator(number());
  return L;
}

DensityMatrix steady_state(const Liouvillian& L) {
  Eigen::JacobiSVD<Mat4> svd(L.matrix);
  const auto& s = svd.singularValues();  // descending
  if (!(s(2) > 1e-12 * s(0))) throw SingularityError("Liouvillian null space is not one-dimensional");

  Eigen::Matrix<cplx, 5, 4> bordered;
  bordered.topRows<4>() = L.matrix;
  bordered.row(4) << 1.0, 0.0, 0.0, 1.0;
  Eigen::Matrix<cplx, 5, 1> rhs = Eigen::Matrix<cplx, 5, 1>::Zero();
  rhs(4) = 1.0;
  const Vec4 x = bordered.colPivHouseholderQr().solve(rhs);

  Mat2 rho = unvec(x);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace();
  const double scale = std::max(1.0, L.matrix.cwiseAbs().maxCoeff());
  const double residual = (L.matrix * vec(rho)).norm();
  if (!(residual <= 1e-12 * scale)) throw SingularityError("steady-state residual too large");
  return DensityMatrix{rho};
}

Propagator::Propagator(const Mat4& generator) : generator_(generator) {
  Eigen::ComplexEigenSolver<Mat4> es(generator);
  if (es.info() == Eigen::Success) {
    vectors_ = es.eigenvectors();
    values_ = es.eigenvalues();
    Eigen::FullPivLU<Mat4> lu(vectors_);
    if (lu.isInvertible()) {
      inverse_ = lu.inverse();
      const double cond = vectors_.cwiseAbs().colwise().sum().maxCoeff() *
                          inverse_.cwiseAbs().colwise().sum().maxCoeff();
      eigen_ok_ = cond < 1e8;
    }
  }
}

Vec4 Propagator::apply(double tau, const Vec4& v) const {
  if (eigen_ok_) {
    const Vec4 c = inverse_ * v;
    Vec4 out = Vec4::Zero();
    for (int k = 0; k < 4; ++k) out += vectors_.col(k) * (std::exp(values_(k) * tau) * c(k));
    return out;
  }
  const Mat4 scaled = generator_ * tau;
  return scaled.exp() * v;
}

std::vector<cplx> Propagator::traced(const Mat2& A, const Vec4& x, std::span<const double> taus) const {
  std::vector<cplx> out(taus.size());
  if (eigen_ok_) {
    const Vec4 c = inverse_ * x;
    cplx amp[4];
    for (int k = 0; k < 4; ++k) amp[k] = trace_with(A, vectors_.col(k)) * c(k);
    for (std::size_t n = 0; n < taus.size(); ++n) {
      cplx acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += amp[k] * std::exp(values_(k) * taus[n]);
      out[n] = acc;
    }
    return out;
  }
  for (std::size_t n = 0; n < taus.size(); ++n) out[n] = trace_with(A, apply(taus[n], x));
  return out;
}

namespace {

struct RegressionTerm {
  Mat2 measured;  // A
  Mat2 left;      // B in B rho C
  Mat2 right;     // C
};

RegressionTerm regression_term(CorrelatorKind kind) {
  const Mat2 id = Mat2::Identity();
  switch (kind) {
    case CorrelatorKind::lower_lower: return {lowering(), lowering(), id};
    case CorrelatorKind::raise_lower: return {raising(), lowering(), id};
    case CorrelatorKind::raise_lower_lower: return {lowering(), lowering(), raising()};
    case CorrelatorKind::number_lower: return {number(), lowering(), id};
    case CorrelatorKind::raise_number_lower: return {number(), lowering(), raising()};
  }
  throw ArgumentError("unknown correlator kind");
}

std::vector<cplx> correlate(const Propagator& prop, CorrelatorKind kind, std::span<const double> taus,
                            const DensityMatrix& rho_ss) {
  for (double t : taus)
    if (t < 0.0) throw ArgumentError("regression correlators need tau >= 0");
  const RegressionTerm term = regression_term(kind);
  const Vec4 x = vec(term.left * rho_ss.rho * term.right);
  return prop.traced(term.measured, x, taus);
}

}  // namespace

std::vector<cplx> regression_correlator(CorrelatorKind kind, std::span<const double> taus, const Liouvillian& L,
                                        const DensityMatrix& rho_ss) {
  return correlate(Propagator(L.matrix), kind, taus, rho_ss);
}

namespace {

double port_intensity(Port mu, const EmitterParams& params, cplx coherence_ratio) {
  const ScatterGeometry geo = ScatterGeometry::from_xi(params.xi);
  const cplx lam = geo.lambda(mu);
  const double zn = geo.z_norm2();
  const cplx zz = geo.z * geo.z / zn;
  const double bg = params.beta * params.gamma_tot;
  return std::norm(lam) / zn + (bg / zn) * ((0.5 * params.beta - zz * std::conj(lam)) * coherence_ratio).real();
}

}  // namespace

EmitterResponse::EmitterResponse(double omega, cplx rabi, const EmitterParams& params)
    : params_(validate(params)),
      rabi_(rabi),
      L_(build_liouvillian(omega, rabi, params)),
      rho_(steady_state(L_)),
      prop_(L_.matrix) {
  if (rabi == 0.0) throw ArgumentError("finite-drive model needs Omega != 0; use the weak-drive analytic path");
}

cplx EmitterResponse::coherence_ratio() const { return rho_.coherence() / rabi_; }

double EmitterResponse::intensity(Port mu) const { return port_intensity(mu, params_, coherence_ratio()); }

std::vector<cplx> EmitterResponse::correlator(CorrelatorKind kind, std::span<const double> taus) const {
  return correlate(prop_, kind, taus, rho_);
}

std::vector<double> EmitterResponse::g2_nonnegative(Port mu, Port nu, std::span<const double> taus) const {
  const ScatterGeometry geo = ScatterGeometry::from_xi(params_.xi);
  const cplx l1 = geo.lambda(mu);
  const cplx l2 = geo.lambda(nu);
  const double zn = geo.z_norm2();
  const double z4n = zn * zn;
  const cplx zz = geo.z * geo.z / zn;
  const cplx z4 = zz * zz;
  const double bg = params_.beta * params_.gamma_tot;
  const double om2 = std::norm(rabi_);
  const cplx s_ratio = coherence_ratio();
  const double n_ss = rho_.excited_population();

  // Delay-independent part.
  const double a1 = std::norm(l1), a2 = std::norm(l2);
  const double static_part =
      a1 * a2 - bg * ((a1 * std::conj(l2) + a2 * std::conj(l1)) * zz * s_ratio).real() +
      0.25 * bg * bg * (a1 + a2) * n_ss / om2;

  const auto k_ll = correlator(CorrelatorKind::lower_lower, taus);
  const auto k_rl = correlator(CorrelatorKind::raise_lower, taus);
  const auto k_rll = correlator(CorrelatorKind::raise_lower_lower, taus);
  const auto k_nl = correlator(CorrelatorKind::number_lower, taus);
  const auto k_rnl = correlator(CorrelatorKind::raise_number_lower, taus);

  // Eight-term expansion; one entry per delay-dependent term.
  struct Term {
    double weight;
    cplx coeff;
    const std::vector<cplx>* corr;
  };
  const Term terms[] = {
      {0.5 * bg * bg, std::conj(l1) * std::conj(l2) * z4 / (rabi_ * rabi_), &k_ll},
      {0.5 * bg * bg, std::conj(l1) * l2 / om2, &k_rl},
      {-0.25 * bg * bg * bg, std::conj(l2) * zz / (rabi_ * om2), &k_rll},
      {-0.25 * bg * bg * bg, std::conj(l1) * zz / (rabi_ * om2), &k_nl},
      {bg * bg * bg * bg / 16.0, 1.0 / (om2 * om2), &k_rnl},
  };

  std::vector<double> out(taus.size());
  for (std::size_t n = 0; n < taus.size(); ++n) {
    double acc = static_part;
    for (const Term& t : terms) acc += t.weight * (t.coeff * (*t.corr)[n]).real();
    out[n] = acc / z4n;
  }
  return out;
}

std::vector<double> EmitterResponse::g2_unnormalized(PortPair pair, std::span<const double> taus) const {
  const Port mu = first_port(pair), nu = second_port(pair);
  std::vector<double> pos, neg;
  std::vector<std::size_t> pos_idx, neg_idx;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (taus[i] >= 0.0) {
      pos.push_back(taus[i]);
      pos_idx.push_back(i);
    } else {
      neg.push_back(-taus[i]);
      neg_idx.push_back(i);
    }
  }
  std::vector<double> out(taus.size());
  const auto gp = g2_nonnegative(mu, nu, pos);
  for (std::size_t k = 0; k < pos.size(); ++k) out[pos_idx[k]] = gp[k];
  if (!neg.empty()) {
    const auto gn = g2_nonnegative(nu, mu, neg);
    for (std::size_t k = 0; k < neg.size(); ++k) out[neg_idx[k]] = gn[k];
  }
  return out;
}

double intensity_full(Port mu, double omega, cplx rabi, const EmitterParams& params) {
  if (rabi == 0.0) throw ArgumentError("finite-drive model needs Omega != 0; use the weak-drive analytic path");
  const DensityMatrix rho = steady_state(build_liouvillian(omega, rabi, validate(params)));
  return port_intensity(mu, params, rho.coherence() / rabi);
}

CorrelationTrace g2_full(PortPair pair, double omega, cplx rabi, const UniformGrid& tau_grid,
                         const EmitterParams& params) {
  const EmitterResponse resp(omega, rabi, params);
  const double norm = resp.intensity(first_port(pair)) * resp.intensity(second_port(pair));
  if (norm == 0.0) throw DegenerateError("g2_full: port intensity vanishes");
  const auto taus = tau_grid.values();
  auto values = resp.g2_unnormalized(pair, taus);
  for (double& v : values) v /= norm;
  return CorrelationTrace(pair, tau_grid, std::move(values));
}

}  // namespace wgqed::dynamics
