#include "qkdv/counterexamples.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qkdv/error.hpp"
#include "qkdv/spectral.hpp"

namespace qkdv {

SpectralField jordan_exact(const SpectralField& u0hat, double delta, double t) {
  const GridSpec& g = u0hat.grid();
  if (g.n_components != 2) throw DimensionError("the Jordan system has two components");
  SpectralField out(g);
  for (std::size_t k = 0; k < g.n_points; ++k) {
    const double xi = g.wavenumber(k);
    const double w = xi * xi * xi;
    const cplx phase = std::exp(cplx(0.0, w * t));
    const cplx a = u0hat(0, k), b = u0hat(1, k);
    out(0, k) = phase * (a + delta * cplx(0.0, w * t) * b);
    out(1, k) = phase * b;
  }
  return out;
}

SpectralField symmetric_exact(const SpectralField& u0hat, double delta, double t) {
  const GridSpec& g = u0hat.grid();
  if (g.n_components != 2) throw DimensionError("the control system has two components");
  SpectralField out(g);
  // Eigenvectors (1, 1)/sqrt2 and (1, -1)/sqrt2 with eigenvalues 1 +- delta.
  for (std::size_t k = 0; k < g.n_points; ++k) {
    const double xi = g.wavenumber(k);
    const double w = xi * xi * xi;
    const cplx p = 0.5 * (u0hat(0, k) + u0hat(1, k));
    const cplx m = 0.5 * (u0hat(0, k) - u0hat(1, k));
    const cplx ep = std::exp(cplx(0.0, (1.0 + delta) * w * t)), em = std::exp(cplx(0.0, (1.0 - delta) * w * t));
    out(0, k) = ep * p + em * m;
    out(1, k) = ep * p - em * m;
  }
  return out;
}

SpectralField jordan_data(const GridSpec& grid, int s, double cutoff) {
  GridSpec g = grid.with_components(2);
  g.validate();
  if (!(cutoff > 0.0) || cutoff >= g.nyquist())
    throw DomainError("cutoff must lie in (0, Nyquist = " + std::to_string(g.nyquist()) + ")");
  SpectralField F(g);
  // 2L c^2 sum <xi>^{-2} ~ 2L c^2 (L / pi) pi = pi.
  const double c = std::sqrt(std::numbers::pi / 2.0) / g.half_length;
  for (std::size_t k = 0; k < g.n_points; ++k) {
    const double xi = g.wavenumber(k);
    if (std::abs(xi) <= cutoff) F(1, k) = c * std::pow(1.0 + xi * xi, -0.5 * (s + 1));
  }
  return F;
}

JordanStudy jordan_growth_study(const GridSpec& grid, int s, double delta, double t,
                                const std::vector<double>& cutoffs) {
  JordanStudy st;
  std::vector<double> norms;
  for (double cut : cutoffs) {
    const SpectralField u0 = jordan_data(grid, s, cut);
    JordanRun r;
    r.delta = delta;
    r.s = s;
    r.cutoff = cut;
    r.t = t;
    r.norm_0 = exact_sobolev_norm(u0, s);
    r.norm_t = exact_sobolev_norm(jordan_exact(u0, delta, t), s);
    st.runs.push_back(r);
    norms.push_back(r.norm_t);
    JordanRun c = r;
    c.norm_t = exact_sobolev_norm(symmetric_exact(u0, delta, t), s);
    st.control.push_back(c);
  }
  st.growth = fit_rate("Xi", "H^" + std::to_string(s) + " at t", cutoffs, std::move(norms));
  double lo = 1e300, hi = 0.0;
  for (const auto& c : st.control) {
    lo = std::min(lo, c.norm_t);
    hi = std::max(hi, c.norm_t);
  }
  st.control_spread = hi > 0.0 ? (hi - lo) / hi : 0.0;
  return st;
}

double characteristic_integral(const Profile& b, double x, double t) {
  if (t == 0.0) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  auto fn = [&](double s) { return b(x + s); };
  const double lo = std::min(0.0, t), hi = std::max(0.0, t);
  const double v = gauss_kronrod<double, 31>::integrate(fn, lo, hi, 15, 1e-13);
  return t > 0.0 ? v : -v;
}

Field wkb_bump(const GridSpec& grid, double center, double width) {
  Field v = Field::from_function(grid.with_components(1), [&](std::size_t, double x) {
    const double r = (x - center) / width;
    return std::abs(r) < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0;
  });
  const double n = l2_norm(v);
  v *= 1.0 / n;
  return v;
}

namespace {

// Support [lo, hi] of a sampled field: points above 1e-14 of the peak.
std::pair<double, double> support(const Field& f) {
  const double peak = f.max_abs();
  double lo = 1e300, hi = -1e300;
  for (std::size_t j = 0; j < f.points(); ++j)
    if (std::abs(f(0, j)) > 1e-14 * peak) {
      lo = std::min(lo, f.grid().x(j));
      hi = std::max(hi, f.grid().x(j));
    }
  return {lo, hi};
}

// Amplitude at rescaled time t = 3 xi^4 tau, on the single-component grid.
Field amplitude(const Profile& b, const Field& v0, double t) {
  const GridSpec& g = v0.grid();
  const auto [lo, hi] = support(v0);
  if (lo - t <= -g.half_length || hi - t >= g.half_length)
    throw DomainError("WKB characteristics leave the box; use a larger half length");
  Field v = apply_multiplier(v0, [t](double xi) { return std::exp(cplx(0.0, xi * t)); });
  for (std::size_t j = 0; j < g.n_points; ++j) {
    if (v(0, j) == 0.0) continue;
    v(0, j) *= std::exp(characteristic_integral(b, g.x(j), t) / 3.0);
  }
  return v;
}

struct Pieces {
  Field v, v1, v2, v3;
  std::vector<double> b;
};

Pieces pieces(const Profile& b, const Field& v0, double t) {
  Pieces p;
  p.v = amplitude(b, v0, t);
  p.v1 = derivative(p.v, 1, 1e-14);
  p.v2 = derivative(p.v, 2, 1e-14);
  p.v3 = derivative(p.v, 3, 1e-14);
  const GridSpec& g = v0.grid();
  p.b.resize(g.n_points);
  for (std::size_t j = 0; j < g.n_points; ++j) p.b[j] = b(g.x(j));
  return p;
}

double complex_norm(const GridSpec& g, const std::vector<cplx>& z) {
  double acc = 0.0;
  for (const cplx& c : z) acc += std::norm(c);
  return std::sqrt(g.spacing() * acc);
}

}  // namespace

WkbSample wkb_solution(const Profile& b, double xi, const Field& v0, double tau) {
  if (v0.components() != 1) throw DimensionError("WKB amplitude is scalar");
  if (tau < 0.0) throw TimeDirectionError("WKB solution is built forward in time");
  const double x2 = xi * xi, x4 = x2 * x2, x6 = x4 * x2;
  const Pieces p = pieces(b, v0, 3.0 * x4 * tau);
  const GridSpec& g1 = v0.grid();
  const GridSpec g2 = g1.with_components(2);
  WkbSample s;
  s.v = p.v;
  s.u = Field(g2);
  s.f = Field(g2);
  std::vector<cplx> w(g1.n_points);
  for (std::size_t j = 0; j < g1.n_points; ++j) {
    const double phi = g1.x(j) * x2 + tau * x6;
    const cplx e = std::exp(cplx(0.0, phi));
    const cplx u = e * p.v(0, j);
    w[j] = cplx(p.v3(0, j) + p.b[j] * p.v2(0, j), 3.0 * x2 * p.v2(0, j) + 2.0 * p.b[j] * x2 * p.v1(0, j));
    const cplx f = e * w[j];
    s.u(0, j) = u.real();
    s.u(1, j) = u.imag();
    s.f(0, j) = f.real();
    s.f(1, j) = f.imag();
  }
  s.v_norm = l2_norm(p.v);
  s.f_norm = complex_norm(g1, w);
  return s;
}

double wkb_residual(const Profile& b, double xi, const Field& v0, double tau) {
  const double x2 = xi * xi, x4 = x2 * x2, x6 = x4 * x2;
  const double t = 3.0 * x4 * tau;
  const Pieces p = pieces(b, v0, t);
  // d_t [E v0(x + t)] = (b(x + t) / 3) v + E v0'(x + t), where E is the
  // exponential weight; only the x-derivatives of v come from the grid.
  const Field shifted_d1 =
      apply_multiplier(derivative(v0, 1, 1e-14), [t](double k) { return std::exp(cplx(0.0, k * t)); });
  const GridSpec& g = v0.grid();
  const std::size_t n = g.n_points;
  const cplx I(0.0, 1.0);
  // Everything below is multiplied by e^{-i phi}.
  std::vector<cplx> dt(n), d3(n), bd2(n), f(n), sum(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = g.x(j);
    const double v = p.v(0, j), v1 = p.v1(0, j), v2 = p.v2(0, j), v3 = p.v3(0, j), bj = p.b[j];
    const double e = shifted_d1(0, j) == 0.0 ? 0.0 : std::exp(characteristic_integral(b, x, t) / 3.0);
    const double dtv = 3.0 * x4 * (b(x + t) / 3.0 * v + e * shifted_d1(0, j));
    dt[j] = dtv + I * x6 * v;
    d3[j] = v3 + 3.0 * I * x2 * v2 - 3.0 * x4 * v1 - I * x6 * v;
    bd2[j] = bj * (v2 + 2.0 * I * x2 * v1 - x4 * v);
    f[j] = cplx(v3 + bj * v2, 3.0 * x2 * v2 + 2.0 * bj * x2 * v1);
    sum[j] = dt[j] + d3[j] + bd2[j] - f[j];
  }
  const double scale = complex_norm(g, dt) + complex_norm(g, d3) + complex_norm(g, bd2) + complex_norm(g, f);
  return scale > 0.0 ? complex_norm(g, sum) / scale : 0.0;
}

WkbRun wkb_run(const Profile& b, const std::string& b_name, double xi, const Field& v0, double t0,
               std::size_t samples) {
  if (samples < 3 || samples % 2 == 0) throw DomainError("WKB time samples must be odd and at least 3");
  WkbRun r;
  r.b_name = b_name;
  r.xi = xi;
  r.t0 = t0;
  r.tau0 = t0 / (3.0 * std::pow(xi, 4));
  r.u0_norm = l2_norm(v0);
  const double dtau = r.tau0 / static_cast<double>(samples - 1);
  double simpson = 0.0;
  double last_v = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const WkbSample s = wkb_solution(b, xi, v0, dtau * static_cast<double>(i));
    r.sup_u = std::max(r.sup_u, s.v_norm);
    const double w = (i == 0 || i == samples - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    simpson += w * s.f_norm;
    last_v = s.v_norm;
  }
  r.forcing_l1l2 = simpson * dtau / 3.0;
  r.ratio = r.sup_u / (r.u0_norm + r.forcing_l1l2);
  r.amplification = last_v / r.u0_norm;
  return r;
}

MizohataReport mizohata_violation_demo(double b0, double a_target, const std::vector<double>& xis,
                                       const GridSpec& grid, double spread_from_xi) {
  if (!(b0 > 0.0)) throw DomainError("the violating profile needs b0 > 0");
  if (!(a_target > 0.0)) throw DomainError("A_target must be positive");
  MizohataReport rep;
  rep.a_target = a_target;
  rep.t0 = 6.0 * std::log(3.0 * a_target) / b0;
  const Field v0 = wkb_bump(grid, 0.5 * rep.t0, 3.0);
  const Profile flat = [b0](double) { return b0; };
  const Profile decaying = [](double x) { return 1.0 / (1.0 + x * x); };
  rep.closed_form_amplification = std::exp(b0 * rep.t0 / 3.0);
  double lo = 1e300, hi = 0.0;
  for (double xi : xis) {
    rep.violating.push_back(wkb_run(flat, "const", xi, v0, rep.t0));
    rep.decaying.push_back(wkb_run(decaying, "<x>^-2", xi, v0, rep.t0));
    if (rep.crossing_xi < 0.0 && rep.violating.back().ratio > a_target) rep.crossing_xi = xi;
    if (xi < spread_from_xi) continue;
    lo = std::min(lo, rep.decaying.back().ratio);
    hi = std::max(hi, rep.decaying.back().ratio);
  }
  if (!rep.violating.empty())
    rep.amplification_error =
        std::abs(rep.violating.back().amplification - rep.closed_form_amplification) / rep.closed_form_amplification;
  rep.decaying_spread = hi > 0.0 ? (hi - lo) / hi : 0.0;
  return rep;
}

}  // namespace qkdv
