#include "qkdv/problems.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qkdv/error.hpp"

namespace qkdv {

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }
double sech(double x) { return 1.0 / std::cosh(x); }

double get(const Params& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void check_keys(const std::string& id, const Params& p, std::set<std::string> allowed) {
  for (const auto& [k, v] : p)
    if (!allowed.count(k)) throw UsageError("problem '" + id + "' has no parameter '" + k + "'");
}

CoefficientSet zero_set(std::size_t n, std::string name) {
  CoefficientSet cs;
  cs.n = n;
  cs.name = std::move(name);
  auto zero = [n](double, double, std::span<const double>) { return Matrix::Zero(n, n).eval(); };
  cs.a = [n](double, double, std::span<const double>) { return Matrix::Identity(n, n).eval(); };
  cs.b = zero;
  cs.c = zero;
  cs.d = zero;
  return cs;
}

Problem airy(const Params& p) {
  check_keys("airy", p, {"amp", "sigma"});
  Problem pr;
  pr.id = "airy";
  pr.description = "scalar Airy equation, a = 1";
  pr.coeffs = zero_set(1, "airy");
  pr.coeffs.c_jm = [](int, double) { return 1.0; };
  const double amp = get(p, "amp", 1.0), sigma = get(p, "sigma", std::sqrt(2.0));
  pr.initial = [amp, sigma](const GridSpec& g) { return gaussian(g, amp, sigma); };
  return pr;
}

Problem varcoef(const Params& p) {
  check_keys("varcoef", p, {"amp", "sigma", "alpha", "beta", "gamma", "kappa"});
  const double al = get(p, "alpha", 0.25), be = get(p, "beta", 0.2), ga = get(p, "gamma", 0.3),
               ka = get(p, "kappa", 0.2);
  Problem pr;
  pr.id = "varcoef";
  pr.description = "scalar variable coefficients with Gaussian and sech profiles";
  CoefficientSet& cs = pr.coeffs;
  cs.n = 1;
  cs.name = "varcoef";
  cs.a = [al](double x, double, std::span<const double>) { return scalar(1.0 + al * std::exp(-x * x)); };
  cs.b = [be](double x, double, std::span<const double>) { return scalar(be * std::exp(-x * x)); };
  cs.c = [ga](double x, double, std::span<const double>) { return scalar(ga * sech(x)); };
  cs.d = [ka](double x, double, std::span<const double>) { return scalar(ka * std::exp(-0.5 * x * x)); };
  const double amp = get(p, "amp", 1.0), sigma = get(p, "sigma", std::sqrt(2.0));
  pr.initial = [amp, sigma](const GridSpec& g) { return gaussian(g, amp, sigma); };
  return pr;
}

Problem varcoef_t(const Params& p) {
  check_keys("varcoef-t", p, {"amp", "sigma", "rate"});
  const double rate = get(p, "rate", 0.5);
  Problem pr = varcoef({});
  pr.id = "varcoef-t";
  pr.description = "varcoef with a slowly time-dependent top coefficient";
  pr.coeffs.name = "varcoef-t";
  pr.coeffs.time_dependent = true;
  pr.coeffs.a = [rate](double x, double t, std::span<const double>) {
    return scalar(1.0 + 0.25 * std::exp(-x * x) * (1.0 + rate * t));
  };
  const double amp = get(p, "amp", 1.0), sigma = get(p, "sigma", std::sqrt(2.0));
  pr.initial = [amp, sigma](const GridSpec& g) { return gaussian(g, amp, sigma); };
  return pr;
}

Problem system2(const Params& p) {
  check_keys("system2", p, {"amp", "sigma"});
  Problem pr;
  pr.id = "system2";
  pr.description = "2x2 system, symmetric a, non-symmetric decaying b and c";
  CoefficientSet& cs = pr.coeffs;
  cs.n = 2;
  cs.name = "system2";
  cs.a = [](double x, double, std::span<const double>) {
    const double g = std::exp(-x * x);
    Matrix m(2, 2);
    m << 1.0 + 0.2 * g, 0.1 * g, 0.1 * g, 1.5;
    return m;
  };
  cs.b = [](double x, double, std::span<const double>) {
    const double g = std::exp(-x * x);
    Matrix m(2, 2);
    m << 0.1 * g, 0.2 * g, -0.1 * g, 0.0;
    return m;
  };
  cs.c = [](double x, double, std::span<const double>) {
    const double s = sech(x);
    Matrix m(2, 2);
    m << 0.0, 0.3 * s, -0.1 * s, 0.2 * std::exp(-x * x);
    return m;
  };
  cs.d = [](double x, double, std::span<const double>) {
    const double g = std::exp(-x * x);
    Matrix m(2, 2);
    m << 0.1 * g, 0.05 * g, 0.0, 0.1 * g;
    return m;
  };
  const double amp = get(p, "amp", 1.0), sigma = get(p, "sigma", std::sqrt(2.0));
  pr.initial = [amp, sigma](const GridSpec& g) {
    Field f = gaussian(g, amp, sigma);
    // Second component shifted so the two are not proportional.
    for (std::size_t j = 0; j < g.n_points; ++j) {
      const double x = g.x(j) - 1.0;
      f(1, j) = 0.5 * amp * std::exp(-x * x / (2.0 * sigma * sigma));
    }
    return f;
  };
  return pr;
}

Problem quasilinear(const Params& p) {
  check_keys("quasilinear", p, {"amp", "sigma"});
  Problem pr;
  pr.id = "quasilinear";
  pr.description = "scalar quasilinear a = 1 + u^2";
  pr.coeffs = zero_set(1, "quasilinear");
  pr.coeffs.state_dependent = true;
  pr.coeffs.a = [](double, double, std::span<const double> z) { return scalar(1.0 + z[0] * z[0]); };
  pr.coeffs.closed_form = [](Coef which, double, double, std::span<const double> z, const Partial& q,
                             Matrix& out) {
    if (which != Coef::a) {
      out = scalar(0.0);
      return true;
    }
    if (q.dx > 0 || q.dt > 0) {
      out = scalar(0.0);
      return true;
    }
    const int order = (q.dz >= 0) + (q.dz2 >= 0);
    const bool only_z0 = (q.dz <= 0) && (q.dz2 <= 0);
    if (!only_z0) out = scalar(0.0);
    else if (order == 1) out = scalar(2.0 * z[0]);
    else out = scalar(2.0);
    return true;
  };
  pr.coeffs.c_jm = [](int, double M) { return 2.0 + M * M; };
  const double amp = get(p, "amp", 0.02), sigma = get(p, "sigma", 3.0);
  pr.initial = [amp, sigma](const GridSpec& g) { return gaussian(g, amp, sigma); };
  return pr;
}

Problem quasilinear_b(const Params& p) {
  check_keys("quasilinear-b", p, {"amp", "sigma"});
  Problem pr;
  pr.id = "quasilinear-b";
  pr.description = "scalar quasilinear with state-dependent a, b, c, d";
  pr.coeffs = zero_set(1, "quasilinear-b");
  CoefficientSet& cs = pr.coeffs;
  cs.state_dependent = true;
  cs.a = [](double, double, std::span<const double> z) { return scalar(1.0 + z[0] * z[0]); };
  cs.b = [](double x, double, std::span<const double> z) { return scalar(0.1 * std::exp(-x * x) + 0.1 * z[2]); };
  cs.c = [](double, double, std::span<const double> z) { return scalar(0.1 * z[1]); };
  cs.d = [](double, double, std::span<const double> z) { return scalar(0.05 * z[0]); };
  cs.c_jm = [](int, double M) { return 2.0 + M * M; };
  const double amp = get(p, "amp", 0.02), sigma = get(p, "sigma", 3.0);
  pr.initial = [amp, sigma](const GridSpec& g) { return gaussian(g, amp, sigma); };
  return pr;
}

Problem jordan(const Params& p, bool symmetric) {
  const std::string id = symmetric ? "symmetric-control" : "jordan";
  check_keys(id, p, {"delta"});
  const double delta = get(p, "delta", symmetric ? 0.5 : 1.0);
  Problem pr;
  pr.id = id;
  pr.description = symmetric ? "constant symmetric 2x2 top coefficient" : "constant Jordan block top coefficient";
  pr.coeffs = zero_set(2, id);
  pr.coeffs.a = [delta, symmetric](double, double, std::span<const double>) {
    Matrix m(2, 2);
    m << 1.0, delta, symmetric ? delta : 0.0, 1.0;
    return m;
  };
  pr.compliant = symmetric;
  pr.initial = [](const GridSpec& g) { return gaussian(g, 1.0, std::sqrt(2.0)); };
  return pr;
}

}  // namespace

Field gaussian(const GridSpec& grid, double amp, double sigma, double x0) {
  return Field::from_function(grid, [&](std::size_t, double x) {
    const double y = x - x0;
    return amp * std::exp(-y * y / (2.0 * sigma * sigma));
  });
}

std::vector<std::string> problem_ids() {
  return {"airy", "varcoef", "varcoef-t", "system2", "quasilinear", "quasilinear-b", "jordan", "symmetric-control"};
}

Problem make_problem(const std::string& id, const Params& params) {
  Problem pr;
  if (id == "airy") pr = airy(params);
  else if (id == "varcoef") pr = varcoef(params);
  else if (id == "varcoef-t") pr = varcoef_t(params);
  else if (id == "system2") pr = system2(params);
  else if (id == "quasilinear") pr = quasilinear(params);
  else if (id == "quasilinear-b") pr = quasilinear_b(params);
  else if (id == "jordan") pr = jordan(params, false);
  else if (id == "symmetric-control") pr = jordan(params, true);
  else throw UsageError("unknown problem '" + id + "'");
  pr.grid.n_components = pr.coeffs.n;
  return pr;
}

CoefficientSet time_reversed(const CoefficientSet& cs) {
  CoefficientSet r = cs;
  r.name = cs.name + "-reversed";
  const std::size_t n = cs.n;
  auto flip = [n](std::span<const double> z) {
    std::vector<double> w(z.begin(), z.end());
    for (std::size_t i = n; i < std::min<std::size_t>(2 * n, w.size()); ++i) w[i] = -w[i];
    return w;
  };
  r.a = [f = cs.a, flip](double x, double t, std::span<const double> z) { return f(-x, -t, flip(z)); };
  r.b = [f = cs.b, flip](double x, double t, std::span<const double> z) { return (-f(-x, -t, flip(z))).eval(); };
  r.c = [f = cs.c, flip](double x, double t, std::span<const double> z) { return f(-x, -t, flip(z)); };
  r.d = [f = cs.d, flip](double x, double t, std::span<const double> z) { return (-f(-x, -t, flip(z))).eval(); };
  // Closed forms do not transform trivially; fall back to differences.
  r.closed_form = nullptr;
  return r;
}

}  // namespace qkdv
