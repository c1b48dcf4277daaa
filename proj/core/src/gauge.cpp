#include "qkdv/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "qkdv/error.hpp"
#include "qkdv/spectral.hpp"

namespace qkdv {

double gauge_phi(double N, double x) { return -N * (std::atan(x) + 0.5 * std::numbers::pi); }
double gauge_dphi(double N, double x) { return -N / (1.0 + x * x); }
double gauge_d2phi(double N, double x) {
  const double q = 1.0 + x * x;
  return 2.0 * N * x / (q * q);
}
double gauge_d3phi(double N, double x) {
  const double q = 1.0 + x * x;
  return 2.0 * N * (1.0 - 3.0 * x * x) / (q * q * q);
}

double GaugeData::sup_abs_phi() const {
  double s = 0.0;
  for (double p : phi) s = std::max(s, std::abs(p));
  return s;
}

GaugeData build_gauge(const GridSpec& grid, double N) {
  if (!(N >= 0.0)) throw DomainError("gauge strength N must be nonnegative");
  GaugeData g;
  g.grid = grid.with_components(1);
  g.N = N;
  const std::size_t n = grid.n_points;
  g.phi.resize(n);
  g.dphi.resize(n);
  g.d2phi.resize(n);
  g.d3phi.resize(n);
  g.exp_phi.resize(n);
  g.exp_neg_phi.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = grid.x(j);
    g.phi[j] = gauge_phi(N, x);
    g.dphi[j] = gauge_dphi(N, x);
    g.d2phi[j] = gauge_d2phi(N, x);
    g.d3phi[j] = gauge_d3phi(N, x);
    g.exp_phi[j] = std::exp(g.phi[j]);
    g.exp_neg_phi[j] = std::exp(-g.phi[j]);
  }
  return g;
}

GaugeData build_gauge(const GridSpec& grid, const AssumptionConstants& constants) {
  return build_gauge(grid, constants.N);
}

Field gauge_state(const Field& u, const GaugeData& g, GaugeDirection direction) {
  if (u.points() != g.grid.n_points) throw DimensionError("gauge and state grids differ");
  const auto& w = direction == GaugeDirection::forward ? g.exp_neg_phi : g.exp_phi;
  Field out = u;
  for (std::size_t c = 0; c < u.components(); ++c)
    for (std::size_t j = 0; j < u.points(); ++j) out(c, j) *= w[j];
  return out;
}

CoefficientFields gauged_coefficients(const CoefficientFields& cf, const GaugeData& g) {
  CoefficientFields out = cf;
  for (std::size_t j = 0; j < cf.grid.n_points; ++j) {
    const double p1 = g.dphi[j], p2 = g.d2phi[j], p3 = g.d3phi[j];
    const auto a = cf.a.at(j), b = cf.b.at(j), c = cf.c.at(j);
    out.b.at(j) = b + 3.0 * p1 * a;
    out.c.at(j) = c + 2.0 * p1 * b + 3.0 * (p1 * p1 + p2) * a;
    out.d.at(j) = cf.d.at(j) + p1 * c + (p1 * p1 + p2) * b + (p1 * p1 * p1 + 3.0 * p2 * p1 + p3) * a;
  }
  return out;
}

Field apply_operator(const CoefficientFields& cf, const Field& v, double floor) {
  if (v.components() != cf.n()) throw DimensionError("operator and state sizes differ");
  const Field d1 = derivative(v, 1, floor), d2 = derivative(v, 2, floor), d3 = derivative(v, 3, floor);
  Field out(v.grid());
  const std::size_t n = cf.n();
  Eigen::VectorXd x0(n), x1(n), x2(n), x3(n);
  for (std::size_t j = 0; j < v.points(); ++j) {
    for (std::size_t c = 0; c < n; ++c) {
      x0[c] = v(c, j);
      x1[c] = d1(c, j);
      x2[c] = d2(c, j);
      x3[c] = d3(c, j);
    }
    const Eigen::VectorXd r = cf.a.at(j) * x3 + cf.b.at(j) * x2 + cf.c.at(j) * x1 + cf.d.at(j) * x0;
    for (std::size_t c = 0; c < n; ++c) out(c, j) = r[c];
  }
  return out;
}

Field conjugated_operator(const CoefficientFields& cf, const GaugeData& g, const Field& v) {
  // e^{phi} v decays wherever v does, so it can be differentiated spectrally.
  return gauge_state(apply_operator(cf, gauge_state(v, g, GaugeDirection::inverse), 0.0), g,
                     GaugeDirection::forward);
}

double conjugation_residual(const CoefficientFields& cf, const GaugeData& g, const Field& v) {
  const Field lhs = apply_operator(cf, gauge_state(v, g, GaugeDirection::inverse), 0.0);
  const Field rhs = gauge_state(apply_operator(gauged_coefficients(cf, g), v, 0.0), g, GaugeDirection::inverse);
  // Modes above the 2/3 band carry roundoff scaled by |xi|^3 and no signal.
  const double scale = l2_norm(dealias(rhs));
  const double diff = l2_norm(dealias(lhs - rhs));
  return scale > 0.0 ? diff / scale : diff;
}

EnergyMatrices energy_matrices(const CoefficientFields& cf, const CoefficientFields& gauged, const GaugeData& g) {
  const GridSpec& grid = cf.grid;
  const std::size_t n = cf.n();
  const MatrixField a = symmetric_part(cf.a);
  const MatrixField a1 = a.derivative(1), a2 = a.derivative(2), a3 = a.derivative(3);
  const MatrixField& b = cf.b;
  const MatrixField b1 = b.derivative(1);
  const MatrixField sb = symmetric_part(b), sb1 = symmetric_part(b1), sb2 = symmetric_part(b.derivative(2));
  const MatrixField sc1 = symmetric_part(cf.c.derivative(1));
  EnergyMatrices e{grid, cf.t, MatrixField(grid, n), MatrixField(grid, n), MatrixField(grid, n)};
  for (std::size_t j = 0; j < grid.n_points; ++j) {
    const double p1 = g.dphi[j], p2 = g.d2phi[j], p3 = g.d3phi[j];
    const Matrix bj = b.at(j), cj = cf.c.at(j);
    const Matrix kb = bj - bj.transpose();
    const Matrix kb1 = b1.at(j) - b1.at(j).transpose();
    e.B.at(j) = -3.0 * a1.at(j) + bj + bj.transpose() + 6.0 * p1 * a.at(j);
    e.C.at(j) = kb1 - (cj - cj.transpose()) - 2.0 * p1 * kb;
    // Leibniz with the closed-form gauge derivatives.
    const Matrix sbt2 = sb2.at(j) + 3.0 * (p3 * a.at(j) + 2.0 * p2 * a1.at(j) + p1 * a2.at(j));
    const Matrix sct1 = sc1.at(j) + 2.0 * (p2 * sb.at(j) + p1 * sb1.at(j)) +
                        3.0 * ((2.0 * p1 * p2 + p3) * a.at(j) + (p1 * p1 + p2) * a1.at(j));
    const Matrix dt = gauged.d.at(j);
    e.D.at(j) = a3.at(j) - sbt2 + sct1 - (dt + dt.transpose());
  }
  return e;
}

double energy_form(const EnergyMatrices& e, const Field& v) {
  const Field d1 = derivative(v, 1);
  const std::size_t n = v.components();
  Eigen::VectorXd x0(n), x1(n);
  double acc = 0.0;
  for (std::size_t j = 0; j < v.points(); ++j) {
    for (std::size_t c = 0; c < n; ++c) {
      x0[c] = v(c, j);
      x1[c] = d1(c, j);
    }
    acc += x1.dot(e.B.at(j) * x1) + x0.dot(e.C.at(j) * x1) + x0.dot(e.D.at(j) * x0);
  }
  return acc * v.grid().spacing();
}

SignReport energy_sign_check(const EnergyMatrices& e, double A, std::size_t directions) {
  SignReport r;
  r.A = A;
  r.max_weighted_B = -std::numeric_limits<double>::infinity();
  const std::size_t n = e.B.dim();
  for (std::size_t j = 0; j < e.grid.n_points; ++j) {
    const double x = e.grid.x(j);
    const double w2 = 1.0 + x * x;
    const Matrix B = e.B.at(j);
    double form;
    if (n == 1) {
      form = w2 * B(0, 0);
    } else if (n == 2) {
      form = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < directions; ++k) {
        const double th = std::numbers::pi * static_cast<double>(k) / static_cast<double>(directions);
        Eigen::Vector2d xi(std::cos(th), std::sin(th));
        form = std::max(form, w2 * xi.dot(B * xi));
      }
    } else {
      form = w2 * Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (B + B.transpose())).eigenvalues().maxCoeff();
    }
    r.max_weighted_B = std::max(r.max_weighted_B, form);
    r.sup_weighted_C = std::max(r.sup_weighted_C, std::sqrt(w2) * e.C.at(j).operatorNorm());
    r.sup_D = std::max(r.sup_D, e.D.at(j).operatorNorm());
  }
  r.negativity = r.max_weighted_B <= -2.0 + 1e-6;
  r.c_bound = r.sup_weighted_C <= std::sqrt(A) * (1.0 + 1e-12);
  r.d_bound = r.sup_D <= A * (1.0 + 1e-12);
  return r;
}

namespace {

double inner(const Field& a, const Field& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) acc += a.values()[i] * b.values()[i];
  return acc * a.grid().spacing();
}

void require_uniform(const std::vector<double>& times) {
  const double dt = times[1] - times[0];
  for (std::size_t k = 1; k < times.size(); ++k)
    if (std::abs(times[k] - times[k - 1] - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
      throw DomainError("trajectory times must be uniform");
}

}  // namespace

EnergyReport energy_inequality_check(const std::vector<double>& times, const std::vector<Field>& v,
                                     const std::vector<Field>& g, double A) {
  if (times.size() < 3 || v.size() != times.size())
    throw InsufficientDataError("energy check needs at least 3 time samples");
  if (!g.empty() && g.size() != times.size()) throw DimensionError("forcing samples do not match trajectory");
  require_uniform(times);
  const std::size_t K = times.size();
  const double dt = times[1] - times[0];
  std::vector<double> E(K), S(K), G(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    E[k] = inner(v[k], v[k]);
    const Field d1 = derivative(v[k], 1).times([](double x) { return 1.0 / std::sqrt(1.0 + x * x); });
    S[k] = inner(d1, d1);
    if (!g.empty()) G[k] = std::abs(inner(g[k], v[k]));
  }
  EnergyReport rep;
  rep.min_margin = std::numeric_limits<double>::infinity();
  rep.pass = true;
  for (std::size_t k = 0; k < K; ++k) {
    double dE;
    if (k == 0) dE = (-3.0 * E[0] + 4.0 * E[1] - E[2]) / (2.0 * dt);
    else if (k == K - 1) dE = (3.0 * E[K - 1] - 4.0 * E[K - 2] + E[K - 3]) / (2.0 * dt);
    else dE = (E[k + 1] - E[k - 1]) / (2.0 * dt);
    EnergyStep s{times[k], dE + S[k], A * E[k] + 2.0 * G[k], 0.0};
    s.margin = s.rhs - s.lhs;
    if (s.margin < -1e-6 * std::max(1.0, s.rhs)) rep.pass = false;
    rep.min_margin = std::min(rep.min_margin, s.margin);
    rep.steps.push_back(s);
  }
  // Gronwall consequence, in logs to avoid overflow of e^{At}.
  double cum = 0.0;
  rep.gronwall_max_ratio = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    if (k > 0) cum += 0.5 * dt * (G[k] + G[k - 1]);
    const double base = E[0] + cum;
    double ratio = 0.0;
    if (E[k] > 0.0) ratio = base > 0.0 ? std::exp(std::log(E[k]) - A * (times[k] - times[0]) - std::log(base))
                                       : std::numeric_limits<double>::infinity();
    rep.gronwall_max_ratio = std::max(rep.gronwall_max_ratio, ratio);
  }
  rep.gronwall_pass = rep.gronwall_max_ratio <= 1.0 + 1e-6;
  return rep;
}

SmoothingReport smoothing_functional(const std::vector<double>& times, const std::vector<Field>& u,
                                     const Field& u0, const std::vector<Field>& f, double A) {
  if (times.size() != u.size() || times.size() < 2) throw InsufficientDataError("smoothing needs a trajectory");
  if (!f.empty() && f.size() != u.size()) throw DimensionError("forcing samples do not match trajectory");
  auto inv_w = [](double x) { return 1.0 / std::sqrt(1.0 + x * x); };
  auto w = [](double x) { return std::sqrt(1.0 + x * x); };
  const std::size_t K = times.size();
  std::vector<double> L(K), U(K), F(K, 0.0);
  SmoothingReport r;
  for (std::size_t k = 0; k < K; ++k) {
    const Field du = bessel_multiplier(u[k], 1.0);
    const double l = l2_norm(du.times(inv_w));
    const double un = l2_norm(du);
    L[k] = l * l;
    U[k] = un * un;
    r.unweighted_sup = std::max(r.unweighted_sup, un);
    if (!f.empty()) {
      const double fn = l2_norm(bessel_multiplier(f[k], -1.0).times(w));
      F[k] = fn * fn;
    }
  }
  auto trap = [&](const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t k = 1; k < K; ++k) s += 0.5 * (times[k] - times[k - 1]) * (y[k] + y[k - 1]);
    return std::sqrt(s);
  };
  r.lhs = trap(L);
  r.unweighted = trap(U);
  r.rhs = A * (l2_norm(u0) + trap(F));
  r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : (r.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  r.pass = r.ratio <= 1.0 + 1e-6;
  return r;
}

}  // namespace qkdv
