#include "qkdv/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qkdv/error.hpp"
#include "qkdv/gauge.hpp"
#include "qkdv/spectral.hpp"

namespace qkdv {

std::size_t z_arity(Coef which, std::size_t n) {
  switch (which) {
    case Coef::a:
    case Coef::b: return 3 * n;
    case Coef::c: return 2 * n;
    case Coef::d: return n;
  }
  return 0;
}

static const char* coef_name(Coef c) {
  switch (c) {
    case Coef::a: return "a";
    case Coef::b: return "b";
    case Coef::c: return "c";
    case Coef::d: return "d";
  }
  return "?";
}

const CoefficientSet::Eval& CoefficientSet::eval(Coef which) const {
  switch (which) {
    case Coef::a: return a;
    case Coef::b: return b;
    case Coef::c: return c;
    case Coef::d: return d;
  }
  return a;
}

void CoefficientSet::validate() const {
  if (n == 0) throw DimensionError("coefficient set needs n >= 1");
  if (!a || !b || !c || !d) throw DimensionError("coefficient set '" + name + "' is missing an evaluator");
}

Matrix CoefficientSet::value(Coef which, double x, double t, std::span<const double> z) const {
  Matrix m = eval(which)(x, t, z);
  if (static_cast<std::size_t>(m.rows()) != n || static_cast<std::size_t>(m.cols()) != n)
    throw DimensionError(std::string("coefficient ") + coef_name(which) + " returned a matrix of the wrong size");
  return m;
}

namespace {

double fd_step(int order) {
  if (order <= 1) return 1e-5;
  return std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (order + 2));
}

double binom(int k, int i) {
  double r = 1.0;
  for (int j = 1; j <= i; ++j) r = r * (k - i + j) / j;
  return r;
}

// Central difference of order k: sum_i (-1)^i C(k,i) f(x + (k/2 - i) h) / h^k.
template <class F>
Matrix central(F&& f, double x, int k) {
  const double h = fd_step(k);
  Matrix acc;
  for (int i = 0; i <= k; ++i) {
    Matrix v = f(x + (0.5 * k - i) * h);
    const double w = (i % 2 ? -1.0 : 1.0) * binom(k, i);
    if (i == 0) acc = w * v;
    else acc += w * v;
  }
  return acc / std::pow(h, k);
}

}  // namespace

Matrix CoefficientSet::partial(Coef which, double x, double t, std::span<const double> z, const Partial& p) const {
  if (p.dx == 0 && p.dt == 0 && p.dz < 0 && p.dz2 < 0) return value(which, x, t, z);
  Matrix out;
  if (closed_form && closed_form(which, x, t, z, p, out)) return out;
  if (p.dt > 0) {
    Partial q = p;
    q.dt -= 1;
    return central([&](double tt) { return partial(which, x, tt, z, q); }, t, 1);
  }
  std::vector<double> zz(z.begin(), z.end());
  if (p.dz2 >= 0 || p.dz >= 0) {
    Partial q = p;
    int axis;
    if (p.dz2 >= 0) {
      axis = p.dz2;
      q.dz2 = -1;
    } else {
      axis = p.dz;
      q.dz = -1;
    }
    if (static_cast<std::size_t>(axis) >= zz.size()) throw DimensionError("z-partial index out of range");
    const double z0 = zz[axis];
    return central(
        [&](double s) {
          zz[axis] = s;
          return partial(which, x, t, zz, q);
        },
        z0, 1);
  }
  return central([&](double xx) { return value(which, xx, t, z); }, x, p.dx);
}

bool CoefficientFields::all_finite() const {
  return a.all_finite() && b.all_finite() && c.all_finite() && d.all_finite();
}

std::vector<double> StateJet::z(Coef which, std::size_t j) const {
  const std::size_t n = grid.n_components;
  const std::size_t k = z_arity(which, n) / n;
  std::vector<double> out(k * n);
  for (std::size_t m = 0; m < k; ++m)
    for (std::size_t c = 0; c < n; ++c) out[m * n + c] = derivs[m](c, j);
  return out;
}

StateJet state_jet(const Field& state) {
  StateJet jet;
  jet.grid = state.grid();
  jet.derivs = {state, derivative(state, 1), derivative(state, 2)};
  return jet;
}

static void sample(const CoefficientSet& cs, Coef which, const StateJet& jet, double t, MatrixField& out) {
  const GridSpec& g = jet.grid;
  const std::size_t n = cs.n;
  for (std::size_t j = 0; j < g.n_points; ++j) {
    const auto z = jet.z(which, j);
    const Matrix m = cs.value(which, g.x(j), t, z);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        if (!std::isfinite(m(r, c))) {
          std::ostringstream os;
          os << "coefficient " << coef_name(which) << " is not finite at x = " << g.x(j) << ", entry (" << r
             << "," << c << ")";
          throw EvaluationError(os.str());
        }
        out.entry(j, r, c) = m(r, c);
      }
  }
}

CoefficientFields freeze(const CoefficientSet& coeffs, const Field& state, double t) {
  coeffs.validate();
  if (state.components() != coeffs.n)
    throw DimensionError("state has " + std::to_string(state.components()) + " components, system has " +
                         std::to_string(coeffs.n));
  const GridSpec& g = state.grid();
  CoefficientFields cf{g, t, MatrixField(g, coeffs.n), MatrixField(g, coeffs.n), MatrixField(g, coeffs.n),
                       MatrixField(g, coeffs.n)};
  const StateJet jet = state_jet(state);
  sample(coeffs, Coef::a, jet, t, cf.a);
  sample(coeffs, Coef::b, jet, t, cf.b);
  sample(coeffs, Coef::c, jet, t, cf.c);
  sample(coeffs, Coef::d, jet, t, cf.d);
  return cf;
}

CoefficientFields freeze_linear(const CoefficientSet& coeffs, const GridSpec& grid, double t) {
  return freeze(coeffs, Field(grid.with_components(coeffs.n)), t);
}

namespace {

// Visits every point of an m-dimensional lattice with k nodes per axis on [-M, M].
template <class F>
void for_each_z(std::size_t dims, std::size_t k, double M, F&& f) {
  std::vector<double> z(dims, 0.0);
  if (dims == 0 || k <= 1 || M == 0.0) {
    f(std::span<const double>(z));
    return;
  }
  std::vector<std::size_t> idx(dims, 0);
  auto node = [&](std::size_t i) { return -M + 2.0 * M * static_cast<double>(i) / static_cast<double>(k - 1); };
  while (true) {
    for (std::size_t d = 0; d < dims; ++d) z[d] = node(idx[d]);
    f(std::span<const double>(z));
    std::size_t d = 0;
    while (d < dims && ++idx[d] == k) idx[d++] = 0;
    if (d == dims) break;
  }
}

double x_node(const LatticeSpec& l, std::size_t i) {
  return -l.half_length + 2.0 * l.half_length * static_cast<double>(i) / static_cast<double>(l.x_points);
}

}  // namespace

DispersiveCheck probe_dispersive(const CoefficientSet& coeffs, double m_box, const LatticeSpec& lattice) {
  coeffs.validate();
  DispersiveCheck out;
  out.lambda = std::numeric_limits<double>::infinity();
  const std::size_t dims = z_arity(Coef::a, coeffs.n);
  const std::size_t zk = coeffs.state_dependent ? lattice.z_points : 1;
  for (std::size_t i = 0; i < lattice.x_points; ++i) {
    const double x = x_node(lattice, i);
    for_each_z(dims, zk, m_box, [&](std::span<const double> z) {
      const Matrix a = coeffs.value(Coef::a, x, 0.0, z);
      if ((a - a.transpose()).cwiseAbs().maxCoeff() >= 1e-12) out.is_symmetric = false;
      const Matrix s = 0.5 * (a + a.transpose());
      const double ev = coeffs.n == 1 ? s(0, 0) : Eigen::SelfAdjointEigenSolver<Matrix>(s).eigenvalues().minCoeff();
      out.lambda = std::min(out.lambda, ev);
      ++out.lattice_points;
    });
  }
  return out;
}

DispersiveCheck check_dispersive(const CoefficientSet& coeffs, double m_box, const LatticeSpec& lattice) {
  const DispersiveCheck c = probe_dispersive(coeffs, m_box, lattice);
  if (!(c.lambda > 0.0)) {
    std::ostringstream os;
    os << "top coefficient of '" << coeffs.name << "' is not uniformly positive definite (sampled lambda = "
       << c.lambda << ")";
    throw EllipticityError(os.str());
  }
  return c;
}

double t_eps_formula(double eps, double c11m, double M) {
  const double denom = 4.0 * c11m * (1.0 + std::pow(M, 11));
  // eps^3 / denom^4 evaluated in logs to survive huge M.
  const double log_t = 3.0 * std::log(eps) - 4.0 * std::log(denom);
  return std::min(std::exp(log_t), 0.5);
}

double AssumptionConstants::t_eps(double eps) const {
  const double c = c_jm ? c_jm(11, M) : 1.0;
  return t_eps_formula(eps, c, M);
}

namespace {

double sup_entry(const MatrixField& m, const std::vector<double>& w) {
  double s = 0.0;
  for (std::size_t j = 0; j < m.points(); ++j) s = std::max(s, w[j] * m.at(j).cwiseAbs().maxCoeff());
  return s;
}

double sup_entry(const MatrixField& m) { return m.max_abs_entry(); }

double b_norm(const MatrixField& m, int order) {
  double s = sup_entry(m);
  MatrixField dm = m;
  for (int k = 1; k <= order; ++k) {
    dm = dm.derivative(1);
    s += sup_entry(dm);
  }
  return s;
}

std::vector<double> weight(const GridSpec& g, double p) {
  std::vector<double> w(g.n_points);
  for (std::size_t j = 0; j < g.n_points; ++j) w[j] = std::pow(1.0 + g.x(j) * g.x(j), 0.5 * p);
  return w;
}

double min_eig(const MatrixField& a) {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < a.points(); ++j) {
    const Matrix s = 0.5 * (a.at(j) + a.at(j).transpose());
    const double ev =
        a.dim() == 1 ? s(0, 0) : Eigen::SelfAdjointEigenSolver<Matrix>(s).eigenvalues().minCoeff();
    lo = std::min(lo, ev);
  }
  return lo;
}

// Central time difference of frozen fields.
CoefficientFields dt_fields(const CoefficientSet& cs, const Field& state, double t) {
  const double h = 1e-5;
  CoefficientFields p = freeze(cs, state, t + h);
  CoefficientFields m = freeze(cs, state, t - h);
  auto diff = [h](MatrixField a, const MatrixField& b) {
    a += (-1.0) * b;
    a *= 1.0 / (2.0 * h);
    return a;
  };
  return {p.grid, t, diff(p.a, m.a), diff(p.b, m.b), diff(p.c, m.c), diff(p.d, m.d)};
}

struct TimeLines {
  double regularity = 0.0;
  double decay_sym = 0.0;
  double decay_anti = 0.0;
};

TimeLines dt_lines(const CoefficientFields& dt) {
  const BoundTerms b = bound_terms(dt);
  return {b.regularity, b.decay_symmetric, b.decay_antisym};
}

void guard(double v, double limit, const char* which) {
  if (!std::isfinite(v) || v > limit) {
    std::ostringstream os;
    os << "assumption " << which << " failed: sampled sup " << v << " exceeds " << limit;
    throw AssumptionError(os.str());
  }
}

AssumptionConstants constants_impl(const CoefficientSet& coeffs, const Field& state, double R, double M,
                                   const ConstantsOptions& opts) {
  coeffs.validate();
  const GridSpec& g = state.grid();
  AssumptionConstants k;
  k.R = R;
  LatticeSpec lattice = opts.lattice;
  lattice.half_length = g.half_length;
  const double m_box = opts.m_box > 0.0 ? opts.m_box : R;
  const DispersiveCheck dc = check_dispersive(coeffs, m_box, lattice);
  if (!dc.is_symmetric) throw AssumptionError("assumption (L1) failed: top coefficient is not symmetric");
  // The lattice check sees the sampled coefficient; the frozen field may dip lower.
  const CoefficientFields cf0 = freeze(coeffs, state, 0.0);
  k.lambda = std::min(dc.lambda, min_eig(cf0.a));
  if (!(k.lambda > 0.0)) throw EllipticityError("frozen top coefficient is not positive definite");

  const BoundTerms b0 = bound_terms(cf0);
  guard(b0.regularity, opts.sup_limit, "(L2)");
  guard(b0.decay_symmetric, opts.sup_limit, "(L3)");
  guard(b0.decay_antisym, opts.sup_limit, "(L3)");
  k.c0_tilde = std::max({b0.regularity, b0.decay_symmetric, b0.decay_antisym});
  k.c0 = std::max(b0.decay_symmetric, b0.decay_antisym);

  // C_1 and the t-lines of (L2)/(L3) over [0, 1].
  const std::size_t nt = std::max<std::size_t>(2, opts.time_samples);
  double c1 = k.c0_tilde;
  std::vector<CoefficientFields> snaps;
  if (coeffs.time_dependent) {
    double reg = 0.0, reg_dt = 0.0, dec_dt = 0.0;
    for (std::size_t i = 0; i < nt; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(nt - 1);
      const BoundTerms bt = bound_terms(freeze(coeffs, state, t));
      const TimeLines dl = dt_lines(dt_fields(coeffs, state, t));
      reg = std::max(reg, bt.regularity);
      reg_dt = std::max(reg_dt, dl.regularity);
      dec_dt = std::max({dec_dt, dl.decay_sym, dl.decay_anti});
    }
    guard(reg + reg_dt, opts.sup_limit, "(L2)");
    guard(dec_dt, opts.sup_limit, "(L3)");
    c1 = std::max({c1, reg + reg_dt, dec_dt});
    k.c0 = std::max(k.c0, dec_dt);
  }
  k.c1 = c1;
  k.N = (2.0 + 10.0 * static_cast<double>(coeffs.n) * k.c0_tilde) / (3.0 * k.lambda);

  // Largest dyadic T <= 1 on which the doubled time-0 bounds hold.
  k.T = 0.0;
  for (int p = 0; p <= 30 && k.T == 0.0; ++p) {
    const double T = std::ldexp(1.0, -p);
    bool ok = true;
    const std::size_t samples = coeffs.time_dependent ? nt : 1;
    for (std::size_t i = 0; i < samples && ok; ++i) {
      const double t = samples == 1 ? 0.0 : T * static_cast<double>(i) / static_cast<double>(samples - 1);
      const BoundTerms bt = bound_terms(freeze(coeffs, state, t));
      ok = bt.min_eig_a >= 0.5 * k.lambda && bt.regularity <= 2.0 * k.c0_tilde &&
           bt.decay_symmetric <= 2.0 * k.c0_tilde && bt.decay_antisym <= 2.0 * k.c0_tilde;
    }
    if (ok) k.T = T;
  }
  if (k.T == 0.0) throw AssumptionError("no dyadic window T >= 2^-30 keeps the doubled (L1)-(L3) bounds");

  // A from the energy matrices on [0, T].
  const GaugeData gauge = build_gauge(g, k.N);
  const std::vector<double> wx = weight(g, 1.0);
  double supC = 0.0, supD = 0.0;
  const std::size_t samples = coeffs.time_dependent ? nt : 1;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = samples == 1 ? 0.0 : k.T * static_cast<double>(i) / static_cast<double>(samples - 1);
    const CoefficientFields cf = freeze(coeffs, state, t);
    const EnergyMatrices e = energy_matrices(cf, gauged_coefficients(cf, gauge), gauge);
    for (std::size_t j = 0; j < g.n_points; ++j) {
      supC = std::max(supC, wx[j] * e.C.at(j).operatorNorm());
      supD = std::max(supD, e.D.at(j).operatorNorm());
    }
  }
  guard(supC, opts.sup_limit, "(L3)");
  guard(supD, opts.sup_limit, "(L2)");
  k.A = std::max({1.0, supC * supC, supD});
  k.M = M > 0.0 ? M : (16.0 * k.A + 2.0) * R;
  if (coeffs.c_jm) {
    k.c_jm = coeffs.c_jm;
  } else {
    CoefficientSet copy = coeffs;
    k.c_jm = [copy, lattice](int J, double Mb) { return sampled_c_jm(copy, J, Mb, lattice); };
  }
  std::ostringstream os;
  os << lattice.x_points << " x-points on [-" << lattice.half_length << ", " << lattice.half_length << "] x "
     << (coeffs.state_dependent ? lattice.z_points : 1) << "^" << z_arity(Coef::a, coeffs.n)
     << " z-points on [-" << m_box << ", " << m_box << "]; x-sups on the " << g.n_points << "-point grid";
  k.lattice = os.str();
  return k;
}

}  // namespace

BoundTerms bound_terms(const CoefficientFields& cf) {
  const GridSpec& g = cf.grid;
  const std::vector<double> w2 = weight(g, 2.0), w1 = weight(g, 1.0);
  BoundTerms t;
  t.regularity = b_norm(cf.a, 3) + b_norm(cf.b, 2) + b_norm(cf.c, 1) + b_norm(cf.d, 0);
  t.decay_symmetric = sup_entry(cf.a.derivative(1), w2) + sup_entry(cf.b, w2);
  const MatrixField bd = antisymmetric_part(cf.b), cd = antisymmetric_part(cf.c);
  t.decay_antisym = sup_entry(bd.derivative(1), w1) + sup_entry(cd, w1);
  t.min_eig_a = min_eig(cf.a);
  return t;
}

AssumptionConstants compute_constants(const CoefficientSet& coeffs, const GridSpec& grid, double R, double M,
                                      const ConstantsOptions& opts) {
  return constants_impl(coeffs, Field(grid.with_components(coeffs.n)), R, M, opts);
}

AssumptionConstants compute_constants_frozen(const CoefficientSet& coeffs, const Field& state, double R,
                                             double M, const ConstantsOptions& opts) {
  return constants_impl(coeffs, state, R, M, opts);
}

double sampled_c_jm(const CoefficientSet& coeffs, int J, double M, const LatticeSpec& lattice) {
  coeffs.validate();
  const int order = std::clamp(J, 0, 6);
  double best = 0.0;
  for (Coef which : {Coef::a, Coef::b, Coef::c, Coef::d}) {
    const std::size_t dims = z_arity(which, coeffs.n);
    const std::size_t zk = coeffs.state_dependent ? lattice.z_points : 1;
    for (std::size_t i = 0; i < lattice.x_points; ++i) {
      const double x = x_node(lattice, i);
      for_each_z(dims, zk, M, [&](std::span<const double> z) {
        for (int beta = 0; beta <= order; ++beta)
          best = std::max(best, coeffs.partial(which, x, 0.0, z, Partial{beta, 0, -1, -1}).cwiseAbs().maxCoeff());
        if (coeffs.time_dependent)
          best = std::max(best, coeffs.partial(which, x, 0.0, z, Partial{0, 1, -1, -1}).cwiseAbs().maxCoeff());
        if (!coeffs.state_dependent) return;
        std::vector<double> zz(z.begin(), z.end());
        for (std::size_t axis = 0; axis < dims; ++axis) {
          const double z0 = zz[axis];
          for (int gamma = 1; gamma <= order; ++gamma) {
            const Matrix m = central(
                [&](double s) {
                  zz[axis] = s;
                  return coeffs.value(which, x, 0.0, zz);
                },
                z0, gamma);
            zz[axis] = z0;
            best = std::max(best, m.cwiseAbs().maxCoeff());
          }
        }
      });
    }
  }
  return std::max(best, 1e-300);
}

}  // namespace qkdv
