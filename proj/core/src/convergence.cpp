#include "qkdv/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qkdv/error.hpp"
#include "qkdv/parallel.hpp"
#include "qkdv/quasilinear.hpp"
#include "qkdv/spectral.hpp"

namespace qkdv {

namespace {

double smooth_zero(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

double weight2(double x) { return 1.0 + x * x; }

}  // namespace

double mollifier_profile(double r) {
  r = std::abs(r);
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double t = r - 1.0;
  const double up = smooth_zero(1.0 - t), down = smooth_zero(t);
  return up / (up + down);
}

void MollifierSpec::validate() const {
  if (!(kappa > 0.0 && kappa <= 1.0)) throw DomainError("mollifier kappa must lie in (0, 1]");
}

Field mollify_data(const Field& u0, const MollifierSpec& spec) {
  spec.validate();
  const double k = spec.kappa;
  return apply_multiplier(u0, [k](double xi) { return cplx(mollifier_profile(k * xi), 0.0); });
}

SpectralField mollify_data(const SpectralField& u0, const MollifierSpec& spec) {
  spec.validate();
  SpectralField out = u0;
  const GridSpec& g = u0.grid();
  for (std::size_t c = 0; c < g.n_components; ++c)
    for (std::size_t k = 0; k < g.n_points; ++k) out(c, k) *= mollifier_profile(spec.kappa * g.wavenumber(k));
  return out;
}

std::vector<Field> mollify_data(const std::vector<Field>& series, const MollifierSpec& spec) {
  std::vector<Field> out;
  out.reserve(series.size());
  for (const Field& f : series) out.push_back(mollify_data(f, spec));
  return out;
}

ForcingFn mollify_forcing(const ForcingFn& f, const MollifierSpec& spec) {
  if (!f) return {};
  spec.validate();
  return [f, spec](double t) { return mollify_data(f(t), spec); };
}

SpectralField threshold_spectrum(const GridSpec& grid, double p, double scale) {
  grid.validate();
  SpectralField F(grid);
  for (std::size_t c = 0; c < grid.n_components; ++c)
    for (std::size_t k = 0; k < grid.n_points; ++k) {
      const double xi = grid.wavenumber(k);
      F(c, k) = scale * std::pow(1.0 + xi * xi, -0.5 * p);
    }
  return F;
}

Field highpass_threshold_data(const GridSpec& grid, const ThresholdDataSpec& spec) {
  grid.validate();
  GridSpec big = grid;
  big.half_length = 4.0 * grid.half_length;
  big.n_points = 4 * grid.n_points;
  big.n_components = 1;
  SpectralField K(big);
  for (std::size_t k = 0; k < big.n_points; ++k) {
    const double xi = big.wavenumber(k);
    const double mag = std::pow(1.0 + xi * xi, -0.5 * spec.p) * (1.0 - mollifier_profile(std::abs(xi) / spec.xi0));
    K(0, k) = mag * std::exp(cplx(0.0, -xi * spec.x0));
  }
  Field kb = inverse_transform(K);
  const double peak = kb.max_abs();
  if (!(peak > 0.0)) throw DomainError("threshold data kernel vanished; lower xi0");
  Field out(grid);
  const std::size_t offset = big.n_points / 2 - grid.n_points / 2;
  for (std::size_t j = 0; j < grid.n_points; ++j) {
    const double x = big.x(offset + j);
    const double v = spec.amplitude * kb(0, offset + j) / peak * std::exp(-x * x / (spec.sigma * spec.sigma));
    for (std::size_t c = 0; c < grid.n_components; ++c) out(c, j) = v;
  }
  return out;
}

BonaSmithReport bona_smith_rates(const SpectralField& u0, int s_max, const std::vector<int>& j_list,
                                 const std::vector<double>& kappas) {
  BonaSmithReport rep;
  rep.s_base = s_max;
  rep.j_list = j_list;
  for (int j : j_list) {
    std::vector<double> norms;
    for (double k : kappas) norms.push_back(exact_sobolev_norm(mollify_data(u0, {k}), s_max + j));
    rep.growth.push_back(fit_rate("kappa", "H^" + std::to_string(s_max + j), kappas, std::move(norms)));
  }
  std::vector<double> diffs;
  for (double k : kappas) {
    SpectralField d = mollify_data(u0, {k});
    for (std::size_t i = 0; i < d.coeffs().size(); ++i) d.coeffs()[i] -= u0.coeffs()[i];
    diffs.push_back(exact_sobolev_norm(d, 0.0));
  }
  rep.approximation = fit_rate("kappa", "L2 difference", kappas, std::move(diffs));
  return rep;
}

BonaSmithReport weighted_bona_smith_rates(const Field& u0, int s_base, const std::vector<int>& j_list,
                                          const std::vector<double>& kappas) {
  BonaSmithReport rep;
  rep.weighted = true;
  rep.s_base = s_base;
  rep.j_list = j_list;
  std::vector<Field> moll;
  for (double k : kappas) moll.push_back(mollify_data(u0, {k}));
  for (int j : j_list) {
    std::vector<double> norms;
    for (const Field& m : moll) norms.push_back(sobolev_norm(m.times(weight2), s_base + j));
    rep.growth.push_back(fit_rate("kappa", "<x>^2 H^" + std::to_string(s_base + j), kappas, std::move(norms)));
  }
  std::vector<double> diffs;
  for (const Field& m : moll) diffs.push_back(l2_norm((m - u0).times(weight2)));
  rep.approximation = fit_rate("kappa", "<x>^2 L2 difference", kappas, std::move(diffs));
  return rep;
}

Trajectory evolve(const CoefficientSet& coeffs, const Field& u0, const ForcingFn& f, const SolveConfig& config) {
  if (coeffs.state_dependent) return solve_quasilinear(coeffs, u0, f, config);
  return solve_linear(coeffs, u0, f, config);
}

double sup_difference(const Trajectory& a, const Trajectory& b, double s) {
  if (a.states.size() != b.states.size()) throw DimensionError("trajectories store different sample counts");
  double m = 0.0;
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    m = std::max(m, s == 0.0 ? l2_norm(a.states[i] - b.states[i]) : difference_norm(a.states[i], b.states[i], s));
  }
  return m;
}

double sup_norm(const Trajectory& a, double s) {
  double m = 0.0;
  for (const Field& u : a.states) m = std::max(m, s == 0.0 ? l2_norm(u) : sobolev_norm(u, s));
  return m;
}

EpsConvergenceReport eps_convergence(const CoefficientSet& coeffs, const Field& u0, const ForcingFn& f,
                                     const std::vector<double>& eps_list, const EpsConvergenceOptions& opts) {
  if (eps_list.size() < 4) throw InsufficientDataError("eps convergence needs at least 4 values");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0 && eps_list[i] <= 1.0)) throw DomainError("eps values must lie in (0, 1]");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw DomainError("eps values must decrease");
  }
  // Every eps and eps/2, solved once each.
  std::vector<double> all;
  for (double e : eps_list) {
    all.push_back(e);
    all.push_back(0.5 * e);
  }
  std::sort(all.begin(), all.end(), std::greater<>());
  all.erase(std::unique(all.begin(), all.end(), [](double x, double y) { return std::abs(x - y) <= 1e-14 * x; }),
            all.end());
  auto runs = parallel_map(all.size(), opts.jobs, [&](std::size_t i) {
    SolveConfig cfg;
    cfg.eps = all[i];
    cfg.t_final = opts.t_final;
    cfg.samples = opts.samples;
    try {
      return evolve(coeffs, u0, f, cfg);
    } catch (const Error& e) {
      throw Error("eps = " + std::to_string(all[i]) + ": " + e.what());
    }
  });
  auto find = [&](double e) -> const Trajectory& {
    for (std::size_t i = 0; i < all.size(); ++i)
      if (std::abs(all[i] - e) <= 1e-14 * e) return runs[i];
    throw DomainError("missing eps run");
  };

  EpsConvergenceReport rep;
  const int s = opts.s_max;
  for (const auto& r : runs) rep.m_high = std::max(rep.m_high, sup_norm(r, s));
  std::vector<double> l2, interp, high;
  rep.high_below_bound = true;
  for (double e : eps_list) {
    const Trajectory& a = find(e);
    const Trajectory& b = find(0.5 * e);
    const double d = sup_difference(a, b, 0.0);
    const double bound = std::pow(d, 1.0 / s) * std::pow(2.0 * rep.m_high, (s - 1.0) / s);
    const double h = sup_difference(a, b, s - 1.0);
    l2.push_back(d);
    interp.push_back(bound);
    high.push_back(h);
    if (h > bound * (1.0 + 1e-9)) rep.high_below_bound = false;
  }
  rep.l2 = fit_rate("eps", "C0 L2 Cauchy difference", eps_list, l2);
  rep.interpolated = fit_rate("eps", "interpolated H^" + std::to_string(s - 1) + " bound", eps_list, interp);
  rep.high = fit_rate("eps", "C0 H^" + std::to_string(s - 1) + " Cauchy difference", eps_list, high);
  rep.reference_eps = all.back();
  rep.reference = runs.back();
  return rep;
}

namespace {

// Largest entry of the difference of the coefficients frozen along u and v.
double coefficient_gap(const CoefficientSet& coeffs, const Field& u, const Field& v, double t) {
  const CoefficientFields a = freeze(coeffs, u, t), b = freeze(coeffs, v, t);
  double m = 0.0;
  auto gap = [&m](const MatrixField& x, const MatrixField& y) {
    for (std::size_t i = 0; i < x.data().size(); ++i) m = std::max(m, std::abs(x.data()[i] - y.data()[i]));
  };
  gap(a.a, b.a);
  gap(a.b, b.b);
  gap(a.c, b.c);
  gap(a.d, b.d);
  return m;
}

// H^{8,2} analogue of difference_norm.
double h_s2_difference(const Field& a, const Field& b) {
  double v = 0.0;
  for (int j = 0; j <= 2; ++j) {
    const int p = 2 - j;
    auto w = [p](double x) { return std::pow(1.0 + x * x, 0.5 * p); };
    v += p == 0 ? difference_norm(a, b, 8 + 3 * j) : difference_norm(a.times(w), b.times(w), 8 + 3 * j);
  }
  return v;
}

bool nonincreasing(const std::vector<double>& v, double noise) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1] * (1.0 + noise)) return false;
  return true;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  try {
    return fit_rate("kappa", "", x, y).slope;
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

KappaUniformReport kappa_uniform_study(const CoefficientSet& coeffs, const Field& u0, const ForcingFn& f,
                                       const std::vector<double>& kappas, const std::vector<double>& epss,
                                       const KappaUniformOptions& opts) {
  if (kappas.empty() || epss.empty()) throw InsufficientDataError("kappa study needs kappa and eps values");
  for (std::size_t i = 1; i < kappas.size(); ++i)
    if (!(kappas[i] < kappas[i - 1])) throw DomainError("kappa values must decrease");
  const std::size_t nk = kappas.size(), ne = epss.size();
  // Slot (e, 0) is the unmollified run, (e, 1 + k) the mollified ones.
  const std::size_t per = nk + 1;
  auto runs = parallel_map(ne * per, opts.jobs, [&](std::size_t idx) {
    const std::size_t e = idx / per, k = idx % per;
    SolveConfig cfg;
    cfg.eps = epss[e];
    cfg.t_final = opts.t_final;
    cfg.samples = opts.samples;
    if (k == 0) return evolve(coeffs, u0, f, cfg);
    const MollifierSpec ms{kappas[k - 1]};
    return evolve(coeffs, mollify_data(u0, ms), mollify_forcing(f, ms), cfg);
  });

  KappaUniformReport rep;
  rep.kappas = kappas;
  rep.epss = epss;
  rep.diff_l2.assign(ne, std::vector<double>(nk));
  rep.diff_high.assign(ne, std::vector<double>(nk));
  rep.uniform_l2.assign(nk, 0.0);
  rep.uniform_high.assign(nk, 0.0);
  rep.i1.assign(nk, 0.0);
  rep.i2.assign(nk, 0.0);
  rep.i3.assign(nk, 0.0);
  rep.i3_small.assign(nk, 0.0);
  rep.i3_large.assign(nk, 0.0);
  rep.columns_decreasing = true;
  for (std::size_t e = 0; e < ne; ++e) {
    const Trajectory& ref = runs[e * per];
    for (std::size_t k = 0; k < nk; ++k) {
      const Trajectory& mk = runs[e * per + 1 + k];
      rep.diff_l2[e][k] = sup_difference(ref, mk, 0.0);
      rep.diff_high[e][k] = sup_difference(ref, mk, opts.s_max);
      rep.uniform_l2[k] = std::max(rep.uniform_l2[k], rep.diff_l2[e][k]);
      rep.uniform_high[k] = std::max(rep.uniform_high[k], rep.diff_high[e][k]);
      for (std::size_t i = 0; i < ref.states.size(); ++i) {
        const double t = ref.times[i];
        const Field& u = ref.states[i];
        const Field& uk = mk.states[i];
        const Field gap_op = apply_N_frozen(coeffs, uk, uk, t) - apply_N_frozen(coeffs, u, uk, t);
        rep.i3[k] = std::max(rep.i3[k], l2_norm(gap_op));
        rep.i3_small[k] = std::max(rep.i3_small[k], coefficient_gap(coeffs, uk, u, t));
        rep.i3_large[k] = std::max(rep.i3_large[k], sobolev_norm(uk, opts.s_max + 3));
      }
      if (f) {
        const auto& ft = ref.times;
        double acc = 0.0;
        for (std::size_t i = 1; i < ft.size(); ++i) {
          const MollifierSpec ms{kappas[k]};
          auto gap = [&](double t) { return l2_norm(f(t) - mollify_data(f(t), ms)); };
          acc += 0.5 * (ft[i] - ft[i - 1]) * (gap(ft[i]) + gap(ft[i - 1]));
        }
        rep.i2[k] = acc;
      }
    }
    auto row_l2 = rep.diff_l2[e];
    auto row_h = rep.diff_high[e];
    if (!nonincreasing(row_l2, opts.noise) || !nonincreasing(row_h, opts.noise)) {
      rep.columns_decreasing = false;
      rep.flags.push_back("eps = " + std::to_string(epss[e]) +
                          ": kappa profile not monotone beyond noise, rerun on a finer grid");
    }
  }
  for (std::size_t k = 0; k < nk; ++k) rep.i1[k] = l2_norm(u0 - mollify_data(u0, {kappas[k]}));
  rep.uniform_decreasing = nonincreasing(rep.uniform_l2, opts.noise) && nonincreasing(rep.uniform_high, opts.noise);
  if (!rep.uniform_decreasing) rep.flags.push_back("uniform kappa profile not monotone beyond noise");
  if (nk >= 4) {
    rep.i3_small_slope = loglog_slope(kappas, rep.i3_small);
    rep.i3_large_slope = loglog_slope(kappas, rep.i3_large);
  }
  return rep;
}

std::vector<RateStudy> mollified_growth_study(const CoefficientSet& coeffs, const Field& u0,
                                              const std::vector<double>& kappas, const GrowthOptions& opts) {
  auto sups = parallel_map(kappas.size(), opts.jobs, [&](std::size_t i) {
    PicardConfig pc;
    pc.eps = opts.eps;
    const PicardResult r = picard_solve(coeffs, mollify_data(u0, {kappas[i]}), {}, pc);
    std::vector<double> out(opts.j_list.size(), 0.0);
    for (const Field& u : r.trajectory.states)
      for (std::size_t j = 0; j < opts.j_list.size(); ++j)
        out[j] = std::max(out[j], h_s2_norm(u, opts.s_base + opts.j_list[j]));
    return out;
  });
  std::vector<RateStudy> studies;
  for (std::size_t j = 0; j < opts.j_list.size(); ++j) {
    std::vector<double> norms;
    for (const auto& s : sups) norms.push_back(s[j]);
    studies.push_back(fit_rate("kappa", "C0 H^{" + std::to_string(opts.s_base + opts.j_list[j]) + ",2}", kappas,
                               std::move(norms)));
  }
  return studies;
}

DependenceReport continuous_dependence(const CoefficientSet& coeffs, const std::vector<Field>& data_sequence,
                                       const Field& reference, const SolveConfig& config, double noise,
                                       std::size_t jobs) {
  if (data_sequence.empty()) throw InsufficientDataError("continuous dependence needs a data sequence");
  const std::size_t m = data_sequence.size();
  // Index 0 is the reference; each datum is solved at eps and eps/2.
  auto runs = parallel_map(2 * (m + 1), jobs, [&](std::size_t idx) {
    const std::size_t d = idx / 2;
    SolveConfig cfg = config;
    if (idx % 2 == 1) cfg.eps *= 0.5;
    return evolve(coeffs, d == 0 ? reference : data_sequence[d - 1], {}, cfg);
  });
  const std::vector<double> times = runs[0].times;
  DependenceReport rep;
  for (std::size_t i = 0; i < m; ++i) {
    DependenceRow row;
    row.data_difference = data_norm_y(data_sequence[i] - reference, {}, times);
    const Trajectory& a = runs[2 * (i + 1)];
    double sd = 0.0;
    for (std::size_t k = 0; k < a.states.size(); ++k) sd = std::max(sd, h_s2_difference(a.states[k], runs[0].states[k]));
    row.solution_difference = sd;
    row.lipschitz = row.data_difference > 0.0 ? sd / row.data_difference : 0.0;
    row.viscosity_m = sup_difference(a, runs[2 * (i + 1) + 1], 0.0);
    row.viscosity_ref = sup_difference(runs[0], runs[1], 0.0);
    rep.rows.push_back(row);
  }
  rep.monotone = true;
  for (std::size_t i = 1; i < m; ++i) {
    const double prev = rep.rows[i - 1].solution_difference, cur = rep.rows[i].solution_difference;
    if (!std::isfinite(cur) || cur > prev * (1.0 + noise)) {
      rep.monotone = false;
      rep.flagged_index = static_cast<long>(i);
      break;
    }
  }
  return rep;
}

}  // namespace qkdv
