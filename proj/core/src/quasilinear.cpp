#include "qkdv/quasilinear.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "fpenv.hpp"
#include "qkdv/error.hpp"
#include "qkdv/gauge.hpp"
#include "qkdv/spectral.hpp"

namespace qkdv {

Field apply_N(const CoefficientSet& coeffs, const Field& u, double t) {
  return apply_operator(freeze(coeffs, u, t), u);
}

Field apply_N_frozen(const CoefficientSet& coeffs, const Field& u, const Field& w, double t) {
  return apply_operator(freeze(coeffs, u, t), w);
}

double data_norm_y(const Field& u0, const ForcingFn& f, const std::vector<double>& times) {
  double y = h_s2_norm(u0, 8);
  if (!f || times.empty()) return y;
  double l1 = 0.0, sup4 = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Field fi = f(times[i]);
    const double v = h_s2_norm(fi, 8);
    if (i > 0) l1 += 0.5 * (times[i] - times[i - 1]) * (v + prev);
    prev = v;
    sup4 = std::max(sup4, h_s2_norm(fi, 4));
  }
  return y + l1 + sup4;
}

MoserReport moser_check(const CoefficientSet& coeffs, const Field& u, const Field& v, double M, int s, double t) {
  if (s != 8 && s != 9) throw DomainError("the Moser check is defined for s = 8 and s = 9");
  MoserReport r;
  r.s = s;
  r.M = M;
  const double weight = 1.0 + std::pow(M, s + 3);
  const double nu = h_s2_norm(u, s);
  if (nu > 0.0) r.ratio_a = h_s2_norm(apply_N(coeffs, u, t), s - 3) / (weight * nu);
  const double nd = h_s2_norm(u - v, s);
  if (nd > 0.0) r.ratio_b = h_s2_norm(apply_N(coeffs, u, t) - apply_N(coeffs, v, t), s - 3) / (weight * nd);
  return r;
}

Trajectory solve_quasilinear(const CoefficientSet& coeffs, const Field& u0, const ForcingFn& f,
                             const SolveConfig& config) {
  CoefficientProvider p;
  p.time_dependent = true;
  p.at_state = [&coeffs](double t, const Field& u) { return freeze(coeffs, u, t); };
  return solve_linear(p, u0, f, config);
}

namespace {

double max_abs_eig(const MatrixField& a) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.grid().n_points; ++j) {
    const Matrix s = 0.5 * (a.at(j) + a.at(j).transpose());
    m = std::max(m, Eigen::SelfAdjointEigenSolver<Matrix>(s).eigenvalues().cwiseAbs().maxCoeff());
  }
  return m;
}

// J_m(z) = int_0^1 e^{-z(1 - s)} s^m ds for m = 0, 1, 2.
std::array<double, 3> exp_moments(double z) {
  std::array<double, 3> J{};
  if (z < 0.5) {
    for (int m = 0; m < 3; ++m) {
      // sum_k (-z)^k m! / (m + k + 1)!
      double term = 1.0;
      for (int q = 1; q <= m + 1; ++q) term /= q;
      double fact_m = 1.0;
      for (int q = 1; q <= m; ++q) fact_m *= q;
      term *= fact_m;
      double acc = 0.0;
      for (int k = 0; k < 30; ++k) {
        acc += term;
        term *= -z / static_cast<double>(m + k + 2);
      }
      J[m] = acc;
    }
    return J;
  }
  J[0] = -std::expm1(-z) / z;
  J[1] = (1.0 - J[0]) / z;
  J[2] = (1.0 - 2.0 * J[1]) / z;
  return J;
}

using Spec = std::vector<std::vector<cplx>>;  // [component][half-spectrum slot]

Spec to_spec(const Field& u) {
  Spec S(u.components());
  for (std::size_t c = 0; c < u.components(); ++c) S[c] = series::half_spectrum(u.grid(), u.component(c));
  return S;
}

Field to_field(const GridSpec& g, const Spec& S) {
  Field u(g);
  for (std::size_t c = 0; c < S.size(); ++c) {
    const auto v = series::from_half_spectrum(g, S[c]);
    std::copy(v.begin(), v.end(), u.component(c).begin());
  }
  return u;
}

void truncate_band(const GridSpec& g, Spec& S) {
  const double cut = g.dealiased_cutoff();
  for (auto& c : S)
    for (std::size_t k = 0; k < c.size(); ++k)
      if (k == g.n_points / 2 || std::abs(g.wavenumber(k)) > cut) c[k] = 0.0;
}

}  // namespace

double practical_window(const CoefficientSet& coeffs, const Field& u0, double t0) {
  const double amax = max_abs_eig(freeze(coeffs, u0, t0).a);
  const double xc = u0.grid().dealiased_cutoff();
  return 0.25 / (std::max(amax, 1e-12) * xc * xc * xc);
}

PicardResult picard_solve(const CoefficientSet& coeffs, const Field& u0, const ForcingFn& f,
                          const PicardConfig& config, const AssumptionConstants* constants) {
  if (!(config.eps > 0.0)) throw DomainError("the Duhamel iteration needs eps > 0");
  if (config.nodes < 17 || config.nodes % 2 == 0) throw DomainError("need an odd node count of at least 17");
  if (!u0.all_finite()) throw DomainError("initial data is not finite");
  if (u0.components() != coeffs.n) throw DimensionError("state and system sizes differ");
  detail::FlushDenormals ftz;

  const GridSpec& g = u0.grid();
  const double window = config.window > 0.0 ? config.window : practical_window(coeffs, u0, config.t0);
  const std::size_t K = config.nodes;
  const double h = window / static_cast<double>(K - 1);
  std::vector<double> times(K);
  for (std::size_t i = 0; i < K; ++i) times[i] = config.t0 + h * static_cast<double>(i);

  PicardResult out;
  DuhamelState& st = out.state;
  st.window = window;
  if (constants) st.t_eps = constants->t_eps(config.eps);
  if (config.data_bound > 0.0) {
    const double y = data_norm_y(u0, f, times);
    if (!(y < config.data_bound))
      throw AssumptionError("data norm " + std::to_string(y) + " is not below " + std::to_string(config.data_bound));
  }

  const std::size_t n = g.n_components, half = g.n_points / 2 + 1;
  // Per-mode decay over one node spacing and quadrature weights for the
  // interval ending at node i: interior (nodes i-1, i, i+1) and last (i-2, i-1, i).
  std::vector<double> decay(half);
  std::vector<std::array<double, 3>> w_int(half), w_last(half);
  for (std::size_t k = 0; k < half; ++k) {
    const double xi = k == g.n_points / 2 ? 0.0 : g.wavenumber(k);
    const double z = config.eps * std::pow(xi, 4) * h;
    const auto J = exp_moments(z);
    decay[k] = std::exp(-z);
    w_int[k] = {h * (J[2] - 3.0 * J[1] + 2.0 * J[0]) / 2.0, h * (2.0 * J[1] - J[2]), h * (J[2] - J[1]) / 2.0};
    w_last[k] = {h * (J[2] - J[1]) / 2.0, h * (J[0] - J[2]), h * (J[2] + J[1]) / 2.0};
  }

  Spec U0 = to_spec(u0);
  truncate_band(g, U0);
  std::vector<Spec> U(K, U0);
  std::vector<Field> forcing;
  if (f)
    for (double t : times) forcing.push_back(f(t));

  // One application of Gamma to the node values U.
  auto gamma = [&](const std::vector<Spec>& V) {
    std::vector<Spec> G(K);
    for (std::size_t i = 0; i < K; ++i) {
      const Field ui = to_field(g, V[i]);
      Field gi = apply_N(coeffs, ui, times[i]);
      gi *= -1.0;
      if (f) gi += forcing[i];
      G[i] = to_spec(gi);
      truncate_band(g, G[i]);
    }
    std::vector<Spec> W(K, Spec(n, std::vector<cplx>(half)));
    W[0] = U0;
    Spec I(n, std::vector<cplx>(half));
    std::vector<double> semigroup(half, 1.0);
    for (std::size_t i = 1; i < K; ++i) {
      const bool last = i == K - 1;
      const std::size_t base = last ? i - 2 : i - 1;
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t k = 0; k < half; ++k) {
          const auto& w = last ? w_last[k] : w_int[k];
          I[c][k] = decay[k] * I[c][k] + w[0] * G[base][c][k] + w[1] * G[base + 1][c][k] + w[2] * G[base + 2][c][k];
        }
      for (std::size_t k = 0; k < half; ++k) semigroup[k] *= decay[k];
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t k = 0; k < half; ++k) W[i][c][k] = semigroup[k] * U0[c][k] + I[c][k];
    }
    return W;
  };

  auto max_norm = [&](const std::vector<Spec>& V) {
    double m = 0.0;
    for (const Spec& s : V) m = std::max(m, h_s2_norm(to_field(g, s), 8));
    return m;
  };
  auto max_diff = [&](const std::vector<Spec>& A, const std::vector<Spec>& B) {
    double m = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
      // Differences below the roundoff floor of the iterate itself carry no
      // information; the weights in H^{8,2} would otherwise amplify them.
      Spec D = A[i];
      for (std::size_t c = 0; c < n; ++c) {
        double peak = 0.0;
        for (std::size_t k = 0; k < half; ++k) peak = std::max(peak, std::abs(A[i][c][k]));
        for (std::size_t k = 0; k < half; ++k) {
          D[c][k] -= B[i][c][k];
          if (std::abs(D[c][k]) < 1e-14 * peak) D[c][k] = 0.0;
        }
      }
      m = std::max(m, h_s2_norm(to_field(g, D), 8));
    }
    return m;
  };

  std::size_t stalled = 0;
  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    std::vector<Spec> next = gamma(U);
    const double diff = max_diff(next, U);
    const double norm = max_norm(next);
    if (!std::isfinite(diff) || !std::isfinite(norm))
      throw BlowUpError("Duhamel iterate is not finite", static_cast<long>(it));
    if (config.size_limit > 0.0 && norm > config.size_limit)
      throw BlowUpError("Duhamel iterate left the ball of radius " + std::to_string(config.size_limit),
                        static_cast<long>(it));
    if (!st.differences.empty() && st.differences.back() > 0.0) {
      const double ratio = diff / st.differences.back();
      st.ratios.push_back(ratio);
      stalled = ratio > config.stall_ratio ? stalled + 1 : 0;
      if (stalled >= config.stall_count)
        throw ContractionError("Duhamel map is not contracting on a window of " + std::to_string(window) +
                               "; use a shorter window");
    }
    st.differences.push_back(diff);
    st.iterations = it;
    U = std::move(next);
    st.max_norm = norm;
    if (diff <= config.tol * std::max(norm, std::numeric_limits<double>::min())) {
      st.converged = true;
      break;
    }
  }
  if (st.converged) {
    const double nn = max_norm(U);
    st.idempotence = nn > 0.0 ? max_diff(gamma(U), U) / nn : 0.0;
  }

  Trajectory& tr = out.trajectory;
  tr.config.eps = config.eps;
  tr.config.t_final = window;
  tr.config.samples = K;
  tr.grid = g;
  tr.times = times;
  tr.dt_used = h;
  tr.steps = K - 1;
  for (const Spec& s : U) tr.states.push_back(to_field(g, s));
  tr.forcing = forcing;
  // PDE residual at interior nodes with a five-point time derivative.
  for (std::size_t i = 2; i + 2 < K; ++i) {
    Field ut = tr.states[i - 2] - 8.0 * tr.states[i - 1] + 8.0 * tr.states[i + 1] - tr.states[i + 2];
    ut *= 1.0 / (12.0 * h);
    const Field op = dealias(apply_N(coeffs, tr.states[i], times[i]));
    Field visc = derivative(tr.states[i], 4);
    visc *= config.eps;
    Field e = ut + op + visc;
    double nf = 0.0;
    if (f) {
      e -= forcing[i];
      nf = l2_norm(forcing[i]);
    }
    const double scale = l2_norm(ut) + l2_norm(op) + l2_norm(visc) + nf;
    if (scale > 0.0) tr.max_residual = std::max(tr.max_residual, l2_norm(e) / scale);
  }
  return out;
}

ContinuationReport continuation_solve(const CoefficientSet& coeffs, const Field& u0, const ForcingFn& f,
                                      double t_target, const AssumptionConstants& constants,
                                      const PicardConfig& config) {
  if (!(t_target > 0.0)) throw TimeDirectionError("target time must be positive");
  ContinuationReport rep;
  rep.bound = 8.0 * constants.A * constants.R;
  Trajectory& tr = rep.trajectory;
  tr.grid = u0.grid();
  tr.config.eps = config.eps;
  tr.config.t_final = t_target;
  double t = 0.0;
  Field u = u0;
  bool first = true;
  while (t < t_target * (1.0 - 1e-12)) {
    PicardConfig cfg = config;
    cfg.t0 = t;
    const double w = config.window > 0.0 ? config.window : practical_window(coeffs, u, t);
    cfg.window = std::min(w, t_target - t);
    cfg.data_bound = first ? constants.R : 0.5 * constants.M;
    PicardResult res = picard_solve(coeffs, u, f, cfg, &constants);
    if (first) {
      tr.times.push_back(res.trajectory.times.front());
      tr.states.push_back(res.trajectory.states.front());
      if (f) tr.forcing.push_back(res.trajectory.forcing.front());
    }
    first = false;
    ++rep.windows;
    rep.total_iterations += res.state.iterations;
    rep.all_converged = rep.all_converged && res.state.converged;
    for (double r : res.state.ratios) rep.max_ratio = std::max(rep.max_ratio, r);
    tr.max_residual = std::max(tr.max_residual, res.trajectory.max_residual);
    for (std::size_t i = 0; i < res.trajectory.states.size(); ++i) {
      const double nrm = h_s2_norm(res.trajectory.states[i], 8);
      rep.max_norm = std::max(rep.max_norm, nrm);
      if (nrm > rep.bound && rep.bound_held) {
        rep.bound_held = false;
        rep.violation_time = res.trajectory.times[i];
      }
    }
    u = res.trajectory.states.back();
    t = res.trajectory.times.back();
    tr.times.push_back(t);
    tr.states.push_back(u);
    if (f) tr.forcing.push_back(res.trajectory.forcing.back());
    tr.steps += res.trajectory.steps;
    if (!rep.bound_held) break;
  }
  tr.config.samples = tr.times.size();
  rep.margin = rep.bound - rep.max_norm;
  return rep;
}

namespace {

// Pointwise y = M(x) v(x) for a matrix field and a state.
Field matvec(const MatrixField& M, const Field& v) {
  const std::size_t n = v.components();
  Field out(v.grid());
  for (std::size_t j = 0; j < v.points(); ++j)
    for (std::size_t r = 0; r < n; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < n; ++c) s += M.entry(j, r, c) * v(c, j);
      out(r, j) = s;
    }
  return out;
}

Field dx(const Field& f, int order) { return order == 0 ? f : derivative(f, order, 1e-14); }

}  // namespace

DifferentiatedSystem differentiate_system(const CoefficientSet& coeffs, const Field& u, double t, int s,
                                          bool weighted, double eps) {
  if (s < 0 || s > 14) throw DomainError("differentiation order must lie in [0, 14]");
  const GridSpec& g = u.grid();
  const std::size_t n = coeffs.n;
  if (u.components() != n) throw DimensionError("state and system sizes differ");
  const Field uc = denoise(u);
  const CoefficientFields cf = freeze(coeffs, uc, t);

  DifferentiatedSystem sys;
  sys.s = s;
  sys.weighted = weighted;
  sys.eps = eps;
  sys.a = cf.a;
  std::vector<Field> D(static_cast<std::size_t>(s) + 5);
  for (int k = 0; k <= s + 4; ++k) D[static_cast<std::size_t>(k)] = dx(uc, k);
  const Field G = dx(apply_operator(cf, uc), s);

  if (s == 0) {
    sys.b = cf.b;
    sys.c = cf.c;
    sys.d = cf.d;
  } else {
    const MatrixField ax = cf.a.derivative(1);
    MatrixField blin = ax;
    blin *= static_cast<double>(s);
    blin += cf.b;
    // Closed form for b^s: the linear part plus the chain terms through z^2 = u''.
    sys.b = blin;
    const StateJet jet = state_jet(uc);
    const Field& u2 = jet.derivs[2];
    const Field u3 = D[3];
    for (std::size_t j = 0; j < g.n_points; ++j) {
      const auto za = jet.z(Coef::a, j);
      const auto zb = jet.z(Coef::b, j);
      auto bj = sys.b.at(j);
      for (std::size_t k = 0; k < n; ++k) {
        Partial p;
        p.dz = static_cast<int>(2 * n + k);
        Eigen::VectorXd col = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        // At s = 1 the a-chain term coincides with the one inside s d_x[a].
        if (s > 1) {
          const Matrix pa = coeffs.partial(Coef::a, g.x(j), t, za, p);
          for (std::size_t r = 0; r < n; ++r)
            for (std::size_t q = 0; q < n; ++q) col[r] += pa(r, q) * u3(q, j);
        }
        const Matrix pb = coeffs.partial(Coef::b, g.x(j), t, zb, p);
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t q = 0; q < n; ++q) col[r] += pb(r, q) * u2(q, j);
        bj.col(static_cast<Eigen::Index>(k)) += col;
      }
    }

    // Probes cos/sin(xi x) on each component; fit c^s, d^s pointwise against
    // d^s(L p) - a d^{s+3}p - (s d_x[a] + b) d^{s+2}p.
    const double L = g.half_length;
    std::vector<double> freqs;
    for (double target : {2.0, 3.0, 4.0, 5.0})
      freqs.push_back(std::numbers::pi * std::max(1.0, std::round(target * L / std::numbers::pi)) / L);
    sys.c = MatrixField(g, n);
    sys.d = MatrixField(g, n);
    const std::size_t np = g.n_points;
    // Normal equations per point, row and column.
    std::vector<double> s11(np * n * n), s12(np * n * n), s22(np * n * n), r1(np * n * n), r2(np * n * n);
    for (double xi : freqs)
      for (int phase = 0; phase < 2; ++phase) {
        const double off = phase * 0.5 * std::numbers::pi;
        auto probe_d = [&](int m, double x) {
          return std::pow(xi, m) * std::cos(xi * x + off + 0.5 * std::numbers::pi * m);
        };
        const double w = std::pow(xi, -2.0 * (s + 1));
        for (std::size_t k = 0; k < n; ++k) {
          Field P(g);
          for (std::size_t j = 0; j < np; ++j) P(k, j) = probe_d(0, g.x(j));
          const Field LP = dx(apply_operator(cf, P), s);
          for (std::size_t j = 0; j < np; ++j) {
            const double x = g.x(j);
            const double q3 = probe_d(s + 3, x), q2 = probe_d(s + 2, x), q1 = probe_d(s + 1, x), q0 = probe_d(s, x);
            for (std::size_t r = 0; r < n; ++r) {
              const double R = LP(r, j) - cf.a.entry(j, r, k) * q3 - blin.entry(j, r, k) * q2;
              const std::size_t o = (j * n + r) * n + k;
              s11[o] += w * q1 * q1;
              s12[o] += w * q1 * q0;
              s22[o] += w * q0 * q0;
              r1[o] += w * q1 * R;
              r2[o] += w * q0 * R;
            }
          }
        }
      }
    for (std::size_t j = 0; j < np; ++j)
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t k = 0; k < n; ++k) {
          const std::size_t o = (j * n + r) * n + k;
          const double det = s11[o] * s22[o] - s12[o] * s12[o];
          sys.c.at(j)(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
              (s22[o] * r1[o] - s12[o] * r2[o]) / det;
          sys.d.at(j)(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
              (s11[o] * r2[o] - s12[o] * r1[o]) / det;
        }
  }

  const std::size_t su = static_cast<std::size_t>(s);
  const Field op = matvec(sys.a, D[su + 3]) + matvec(sys.b, D[su + 2]) + matvec(sys.c, D[su + 1]) + matvec(sys.d, D[su]);
  sys.F = G - op;
  const double gn = l2_norm(G);
  const Field check = G - op - sys.F;
  sys.decomposition_residual = gn > 0.0 ? l2_norm(check) / gn : l2_norm(check);
  if (!sys.F.all_finite() || sys.decomposition_residual > 1e-4)
    throw DecompositionError("decomposition of the order " + std::to_string(s) + " derivative failed");

  if (weighted) {
    auto P = [&](const Field& w) {
      Field r = matvec(sys.a, dx(w, 3)) + matvec(sys.b, dx(w, 2)) + matvec(sys.c, dx(w, 1));
      if (eps != 0.0) {
        Field v = dx(w, 4);
        v *= eps;
        r += v;
      }
      return r;
    };
    auto weight = [](double x) { return 1.0 + x * x; };
    const Field& w = D[su];
    sys.E3 = P(w.times(weight)) - P(w).times(weight);
  }
  return sys;
}

namespace {

double l1_time(const std::vector<double>& t, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) s += 0.5 * (t[i] - t[i - 1]) * (v[i] + v[i - 1]);
  return s;
}

double safe_ratio(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

}  // namespace

AprioriReport apriori_check(const CoefficientSet& coeffs, const Trajectory& traj, const AssumptionConstants& constants,
                            const AprioriOptions& opts) {
  if (traj.states.empty()) throw InsufficientDataError("empty trajectory");
  AprioriReport rep;
  const double A = constants.A;
  rep.bound = 8.0 * A * constants.R;
  const double Tp = traj.times.back() - traj.times.front();
  const Field& u0 = traj.states.front();
  const bool forced = !traj.forcing.empty();
  auto weight = [](double x) { return 1.0 + x * x; };

  // Times used for the remainder terms.
  std::vector<std::size_t> idx;
  const std::size_t stride = std::max<std::size_t>(opts.stride, 1);
  for (std::size_t i = 0; i < traj.states.size(); i += stride) idx.push_back(i);
  if (idx.back() != traj.states.size() - 1) idx.push_back(traj.states.size() - 1);
  std::vector<double> tsub;
  for (std::size_t i : idx) tsub.push_back(traj.times[i]);

  {
    AprioriRow row;
    row.inequality = "l2";
    for (const Field& u : traj.states) row.lhs = std::max(row.lhs, l2_norm(u));
    row.rhs = A * (l2_norm(u0) + forcing_l1l2(traj));
    row.ratio = safe_ratio(row.lhs, row.rhs);
    rep.rows.push_back(row);
  }

  auto forcing_term = [&](int s, bool weighted) {
    if (!forced) return 0.0;
    std::vector<double> v;
    for (const Field& fi : traj.forcing) {
      Field d = dx(fi, s);
      v.push_back(l2_norm(weighted ? d.times(weight) : d));
    }
    return l1_time(traj.times, v);
  };

  for (int s = 1; s <= opts.s_max; ++s) {
    AprioriRow row;
    row.s = s;
    row.inequality = "derivative";
    for (const Field& u : traj.states) row.lhs = std::max(row.lhs, l2_norm(dx(u, s)));
    double fsup = 0.0;
    for (std::size_t i : idx)
      fsup = std::max(fsup, l2_norm(differentiate_system(coeffs, traj.states[i], traj.times[i], s, false, opts.eps).F));
    row.rhs = A * (l2_norm(dx(u0, s)) + forcing_term(s, false)) + A * Tp * fsup;
    row.ratio = safe_ratio(row.lhs, row.rhs);
    rep.rows.push_back(row);
  }

  for (int s = 0; s <= opts.s_max_weighted; ++s) {
    AprioriRow row;
    row.s = s;
    row.inequality = "weighted";
    for (const Field& u : traj.states) row.lhs = std::max(row.lhs, l2_norm(dx(u, s).times(weight)));
    std::vector<double> fw, e3;
    for (std::size_t i : idx) {
      const DifferentiatedSystem sys = differentiate_system(coeffs, traj.states[i], traj.times[i], s, true, opts.eps);
      fw.push_back(l2_norm(sys.F.times(weight)));
      e3.push_back(l2_norm(sys.E3));
    }
    row.rhs = A * (l2_norm(dx(u0, s).times(weight)) + forcing_term(s, true)) +
              A * Tp * (l1_time(tsub, fw) + l1_time(tsub, e3));
    row.ratio = safe_ratio(row.lhs, row.rhs);
    rep.rows.push_back(row);
  }

  for (const Field& u : traj.states) rep.sup_h82 = std::max(rep.sup_h82, h_s2_norm(u, 8));
  rep.pass = rep.sup_h82 <= rep.bound;
  for (const AprioriRow& r : rep.rows) rep.pass = rep.pass && r.ratio <= 1.0 + 1e-6;
  return rep;
}

}  // namespace qkdv
