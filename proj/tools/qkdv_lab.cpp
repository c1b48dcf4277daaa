// qkdv-lab: command line front end for the solvers, studies and the acceptance suite.
//
// Exit codes: 0 pass, 1 usage, 2 numerical failure, 3 acceptance failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qkdv/acceptance.hpp"
#include "qkdv/config.hpp"
#include "qkdv/convergence.hpp"
#include "qkdv/counterexamples.hpp"
#include "qkdv/csv.hpp"
#include "qkdv/error.hpp"
#include "qkdv/gauge.hpp"
#include "qkdv/linear.hpp"
#include "qkdv/problems.hpp"
#include "qkdv/quasilinear.hpp"
#include "qkdv/spectral.hpp"
#include "qkdv/trajectory_io.hpp"

namespace fs = std::filesystem;
using namespace qkdv;

namespace {

enum Exit { kPass = 0, kUsage = 1, kNumerical = 2, kAcceptance = 3 };

const std::set<std::string> kKnownKeys = {
    "problem", "grid.half_length", "grid.n_points", "eps", "t_final", "dt", "samples", "integrator",
    "eps_list", "kappa_list", "cutoffs", "xis", "out", "seed", "jobs",
    // solve
    "dump", "zero_data",
    // energy, apriori
    "R", "stride", "s_max", "s_max_weighted",
    // bona-smith
    "data", "p", "j_list", "weighted", "s_base",
    // kappa-uniform
    "noise", "growth",
    // illposed
    "s", "delta", "xi_min", "xi_max", "count",
    // wkb
    "b0", "a_target", "spread_from", "wkb_half_length",
    // accept
    "only"};

struct Context {
  ExperimentConfig exp;
  std::string hash;
  fs::path out;

  void write(const std::string& name, const CsvTable& t) const {
    t.write(out / name, hash);
    std::cout << "wrote " << (out / name).string() << "\n";
  }
};

// The problem's own grid unless the config names one.
Problem load_problem(const ExperimentConfig& e) {
  Problem p = make_problem(e.problem, e.params);
  if (e.source.has("grid.half_length")) p.grid.half_length = e.grid.half_length;
  if (e.source.has("grid.n_points")) p.grid.n_points = e.grid.n_points;
  p.grid.validate();
  return p;
}

ForcingFn forcing_of(const Problem& p) {
  if (!p.forcing) return nullptr;
  return [f = p.forcing, g = p.grid](double t) { return f(g, t); };
}

std::vector<int> as_ints(const std::vector<double>& v) {
  std::vector<int> out;
  for (double x : v) {
    if (x != std::floor(x)) throw UsageError("expected integers in a list");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

std::vector<double> require_list(const std::vector<double>& v, const std::vector<double>& fallback) {
  return v.empty() ? fallback : v;
}

int cmd_solve(const Context& ctx) {
  const ExperimentConfig& e = ctx.exp;
  const Problem p = load_problem(e);
  Field u0 = p.initial(p.grid);
  if (e.source.get_bool("zero_data", false)) u0 = Field(p.grid);
  const Trajectory tr = evolve(p.coeffs, u0, forcing_of(p), e.solve);
  ctx.write("trajectory.csv", trajectory_norms_table(tr));
  if (e.source.get_bool("dump", false)) {
    write_trajectory(ctx.out / "trajectory.bin", tr);
    std::cout << "wrote " << (ctx.out / "trajectory.bin").string() << "\n";
  }
  std::printf("steps %zu dt %.6g max residual %.3e final L2 %.10g\n", tr.steps, tr.dt_used, tr.max_residual,
              l2_norm(tr.final_state()));
  return kPass;
}

int cmd_energy(const Context& ctx) {
  const ExperimentConfig& e = ctx.exp;
  const Problem p = load_problem(e);
  if (p.coeffs.state_dependent) throw UsageError("energy needs a linear problem");
  const AssumptionConstants k = compute_constants(p.coeffs, p.grid, e.source.get_double("R", 1.0), 0.0);
  const GaugeData gd = build_gauge(p.grid, k.N);
  const Field u0 = p.initial(p.grid);
  const ForcingFn f = forcing_of(p);
  CsvTable steps({"eps", "t", "lhs", "rhs", "margin"});
  CsvTable summary({"eps", "energy_pass", "min_margin", "gronwall_ratio", "l2_sup_ratio", "smoothing_ratio",
                    "smoothing_lhs", "smoothing_unweighted"});
  bool ok = true;
  for (double eps : require_list(e.eps_list, {e.solve.eps})) {
    SolveConfig c = e.solve;
    c.eps = eps;
    c.t_final = std::min(c.t_final, k.T);
    const Trajectory tr = solve_linear(p.coeffs, u0, f, c);
    std::vector<Field> v, g;
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
      Field vv = gauge_state(tr.states[i], gd, GaugeDirection::forward);
      // Viscous commutator of the gauge, carried as forcing.
      const Field conj = gauge_state(derivative(gauge_state(vv, gd, GaugeDirection::inverse), 4, 1e-14), gd,
                                     GaugeDirection::forward);
      Field gi = -eps * (conj - derivative(vv, 4, 1e-14));
      if (!tr.forcing.empty()) gi += gauge_state(tr.forcing[i], gd, GaugeDirection::forward);
      g.push_back(std::move(gi));
      v.push_back(std::move(vv));
    }
    const EnergyReport er = energy_inequality_check(tr.times, v, g, k.A);
    const L2BoundReport l2 = verify_l2_bound(tr, u0, k);
    const SmoothingReport sm = smoothing_functional(tr.times, tr.states, u0, tr.forcing, k.A);
    for (const auto& s : er.steps) steps.row() << eps << s.t << s.lhs << s.rhs << s.margin;
    summary.row() << eps << (er.pass ? "pass" : "fail") << er.min_margin << er.gronwall_max_ratio << l2.sup_ratio
                  << sm.ratio << sm.lhs << sm.unweighted;
    ok = ok && er.pass && er.gronwall_pass && l2.pass && sm.pass;
    std::printf("eps %g: energy %s, L2 ratio %.4e, smoothing ratio %.4e\n", eps, er.pass ? "pass" : "FAIL",
                l2.sup_ratio, sm.ratio);
  }
  ctx.write("energy_steps.csv", steps);
  ctx.write("energy_summary.csv", summary);
  return ok ? kPass : kAcceptance;
}

int cmd_apriori(const Context& ctx) {
  const ExperimentConfig& e = ctx.exp;
  const Problem p = load_problem(e);
  if (!p.coeffs.state_dependent) throw UsageError("apriori needs a quasilinear problem");
  const Field u0 = p.initial(p.grid);
  const AssumptionConstants k = compute_constants(p.coeffs, p.grid, e.source.get_double("R", 1.0), 0.0);
  PicardConfig pc;
  pc.eps = e.solve.eps > 0.0 ? e.solve.eps : 0.1;
  const ContinuationReport cr = continuation_solve(p.coeffs, u0, forcing_of(p), e.solve.t_final, k, pc);
  AprioriOptions ao;
  ao.eps = pc.eps;
  ao.s_max = static_cast<int>(e.source.get_int("s_max", ao.s_max));
  ao.s_max_weighted = static_cast<int>(e.source.get_int("s_max_weighted", ao.s_max_weighted));
  ao.stride = static_cast<std::size_t>(std::max(1L, e.source.get_int("stride", 4)));
  const AprioriReport ap = apriori_check(p.coeffs, cr.trajectory, k, ao);
  CsvTable t({"s", "inequality", "lhs", "rhs", "ratio"});
  for (const auto& r : ap.rows) t.row() << r.s << r.inequality << r.lhs << r.rhs << r.ratio;
  ctx.write("apriori.csv", t);
  CsvTable c({"windows", "total_iterations", "max_ratio", "sup_h82", "bound", "margin", "bound_held"});
  c.row() << cr.windows << cr.total_iterations << cr.max_ratio << cr.max_norm << cr.bound << cr.margin
          << (cr.bound_held ? "yes" : "no");
  ctx.write("continuation.csv", c);
  std::printf("Y = %.4f, sup H^{8,2} %.4e vs 8AR %.4e, per-s check %s\n", data_norm_y(u0, {}, {}), cr.max_norm,
              cr.bound, ap.pass ? "pass" : "FAIL");
  return ap.pass && cr.bound_held ? kPass : kAcceptance;
}

int cmd_eps_sweep(const Context& ctx) {
  const ExperimentConfig& e = ctx.exp;
  const Problem p = load_problem(e);
  EpsConvergenceOptions o;
  o.t_final = e.solve.t_final;
  o.samples = e.solve.samples;
  o.s_max = static_cast<int>(e.source.get_int("s_max", o.s_max));
  o.jobs = e.jobs;
  const auto rep = eps_convergence(p.coeffs, p.initial(p.grid), forcing_of(p),
                                   require_list(e.eps_list, {0.04, 0.02, 0.01, 0.005}), o);
  CsvTable t = rate_study_table();
  append_rate_study(t, rep.l2);
  append_rate_study(t, rep.interpolated);
  append_rate_study(t, rep.high);
  ctx.write("eps_sweep.csv", t);
  std::printf("L2 slope %.4f (residual %.3f), interpolated slope %.4f\n", rep.l2.slope, rep.l2.residual,
              rep.interpolated.slope);
  return kPass;
}

int cmd_bona_smith(const Context& ctx) {
  const ExperimentConfig& e = ctx.exp;
  const Config& c = e.source;
  GridSpec g = e.grid;
  g.n_components = 1;
  g.validate();
  const std::string data = c.get_string("data", "gaussian");
  const std::vector<int> js = as_ints(c.get_list("j_list", {1, 2, 3}));
  const std::vector<double> kappas = require_list(e.kappa_list, geometric_sequence(0.125, 0.5, 5));
  const bool weighted = c.get_bool("weighted", false);
  Field u0;
  if (data == "gaussian") u0 = gaussian(g, 1.0, std::sqrt(0.5));
  else if (data == "threshold") u0 = inverse_transform(threshold_spectrum(g, c.get_double("p", 14.55)));
  else if (data == "highpass") {
    ThresholdDataSpec ts;
    ts.p = c.get_double("p", ts.p);
    u0 = highpass_threshold_data(g, ts);
  } else
    throw UsageError("data must be gaussian, threshold or highpass");
  BonaSmithReport rep;
  if (weighted) rep = weighted_bona_smith_rates(u0, static_cast<int>(c.get_int("s_base", 8)), js, kappas);
  else if (data == "threshold")
    rep = bona_smith_rates(threshold_spectrum(g, c.get_double("p", 14.55)), static_cast<int>(c.get_int("s_max", 14)),
                           js, kappas);
  else
    rep = bona_smith_rates(forward_transform(u0), static_cast<int>(c.get_int("s_max", 14)), js, kappas);
  CsvTable t = rate_study_table();
  for (const auto& st : rep.growth) {
    append_rate_study(t, st);
    std::printf("%s slope %.4f\n", st.norm_id.c_str(), st.slope);
  }
  append_rate_study(t, rep.approximation);
  std::printf("%s slope %.4f (min local %.3f)\n", rep.approximation.norm_id.c_str(), rep.approximation.slope,
              rep.approximation.min_local_slope());
  ctx.write("bona_smith.csv", t);
  return kPass;
}

int cmd_kappa_uniform(const Context& ctx) {
  const ExperimentConfig& e = ctx.exp;
  const Problem p = load_problem(e);
  KappaUniformOptions o;
  o.t_final = e.solve.t_final;
  o.samples = e.solve.samples;
  o.s_max = static_cast<int>(e.source.get_int("s_max", o.s_max));
  o.noise = e.source.get_double("noise", o.noise);
  o.jobs = e.jobs;
  const auto rep = kappa_uniform_study(p.coeffs, p.initial(p.grid), forcing_of(p),
                                       require_list(e.kappa_list, geometric_sequence(0.25, std::pow(2.0, -0.25), 5)),
                                       require_list(e.eps_list, {0.1, 0.01, 0.001}), o);
  CsvTable m({"eps", "kappa", "diff_l2", "diff_high"});
  for (std::size_t i = 0; i < rep.epss.size(); ++i)
    for (std::size_t j = 0; j < rep.kappas.size(); ++j)
      m.row() << rep.epss[i] << rep.kappas[j] << rep.diff_l2[i][j] << rep.diff_high[i][j];
  ctx.write("kappa_matrix.csv", m);
  CsvTable terms({"kappa", "uniform_l2", "uniform_high", "i1", "i2", "i3", "i3_small", "i3_large"});
  for (std::size_t j = 0; j < rep.kappas.size(); ++j)
    terms.row() << rep.kappas[j] << rep.uniform_l2[j] << rep.uniform_high[j] << rep.i1[j] << rep.i2[j] << rep.i3[j]
                << rep.i3_small[j] << rep.i3_large[j];
  ctx.write("kappa_terms.csv", terms);
  for (const auto& f : rep.flags) std::printf("flag: %s\n", f.c_str());
  std::printf("columns decreasing: %s, uniform profile decreasing: %s\n", rep.columns_decreasing ? "yes" : "no",
              rep.uniform_decreasing ? "yes" : "no");
  return kPass;
}

int cmd_illposed(const Context& ctx) {
  const ExperimentConfig& e = ctx.exp;
  const Config& c = e.source;
  GridSpec g = e.grid;
  g.n_components = 2;
  g.validate();
  std::vector<double> cutoffs = e.cutoffs;
  if (cutoffs.empty()) {
    const double lo = c.get_double("xi_min", 32.0), hi = c.get_double("xi_max", 256.0);
    const long count = c.get_int("count", 4);
    if (!(lo > 0.0) || !(hi > lo) || count < 4) throw UsageError("need 0 < xi_min < xi_max and count >= 4");
    cutoffs = geometric_sequence(lo, std::pow(hi / lo, 1.0 / static_cast<double>(count - 1)), count);
  }
  for (double x : cutoffs)
    if (!(x < g.nyquist()))
      throw UsageError("cutoff " + format_double(x) + " is not below the grid Nyquist wavenumber " +
                       format_double(g.nyquist()) + "; raise grid.n_points");
  const int s = static_cast<int>(c.get_int("s", 3));
  const JordanStudy st = jordan_growth_study(g, s, c.get_double("delta", 1.0), e.solve.t_final, cutoffs);
  CsvTable t({"Xi", "norm_t", "norm_0", "control_norm_t", "slope"});
  for (std::size_t i = 0; i < st.runs.size(); ++i)
    t.row() << st.runs[i].cutoff << st.runs[i].norm_t << st.runs[i].norm_0 << st.control[i].norm_t << st.growth.slope;
  ctx.write("illposed.csv", t);
  std::printf("slope %.4f (residual %.4f), control spread %.4f\n", st.growth.slope, st.growth.residual,
              st.control_spread);
  return kPass;
}

int cmd_wkb(const Context& ctx) {
  const ExperimentConfig& e = ctx.exp;
  const Config& c = e.source;
  GridSpec g{c.get_double("wkb_half_length", 40.0), e.grid.n_points, 1};
  g.validate();
  const std::vector<double> xis = require_list(e.xis, {2, 4, 8, 16, 32, 64, 128, 256});
  const MizohataReport rep = mizohata_violation_demo(c.get_double("b0", 1.0), c.get_double("a_target", 10.0), xis, g,
                                                     c.get_double("spread_from", 32.0));
  CsvTable t({"b", "xi", "ratio", "sup_u", "u0_norm", "forcing_l1l2", "amplification"});
  for (const auto* runs : {&rep.violating, &rep.decaying})
    for (const WkbRun& w : *runs)
      t.row() << w.b_name << w.xi << w.ratio << w.sup_u << w.u0_norm << w.forcing_l1l2 << w.amplification;
  ctx.write("wkb.csv", t);
  std::printf("t0 %.4f, crossing xi %g, amplification error %.2e, decaying spread %.4f\n", rep.t0, rep.crossing_xi,
              rep.amplification_error, rep.decaying_spread);
  return kPass;
}

int cmd_accept(const Context& ctx) {
  const ExperimentConfig& e = ctx.exp;
  AcceptanceOptions o;
  o.seed = e.seed;
  o.jobs = e.jobs;
  o.n_points = e.source.has("grid.n_points") ? e.grid.n_points : o.n_points;
  o.only = as_ints(e.source.get_list("only", {}));
  for (int id : o.only)
    if (id < 1 || id > 14) throw UsageError("criteria are numbered 1 to 14");
  const AcceptanceReport rep =
      run_acceptance(o, [](const CriterionResult& r) { std::cout << format_result_line(r) << std::endl; });
  write_acceptance_files(rep, ctx.out.string());
  std::cout << "wrote " << rep.files.size() << " CSV files to " << ctx.out.string() << "\n";
  return rep.all_pass() ? kPass : kAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qkdv-lab: pseudospectral laboratory for quasilinear third-order dispersive systems"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir;
  std::size_t jobs = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--jobs", jobs, "worker threads for independent solves")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--set", sets, "override a config key, KEY=VALUE (repeatable)");

  // Per-subcommand overrides land in this map under their config key.
  std::map<std::string, std::string> overrides;
  auto numeric = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(flag, [&overrides, key](const std::string& v) { overrides[key] = v; }, help);
  };

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const Context&);
  };
  const std::vector<Sub> subs = {
      {"solve", "evolve a registered problem and write norms per stored time", cmd_solve},
      {"energy", "energy inequality, L2 bound and local smoothing over an eps sweep", cmd_energy},
      {"apriori", "continuation and per-s a priori inequalities for a quasilinear problem", cmd_apriori},
      {"eps-sweep", "vanishing viscosity rates", cmd_eps_sweep},
      {"bona-smith", "mollifier growth and approximation rates", cmd_bona_smith},
      {"kappa-uniform", "kappa convergence uniformly in eps", cmd_kappa_uniform},
      {"illposed", "Jordan block growth against the frequency cutoff", cmd_illposed},
      {"wkb", "WKB amplification for a constant and a decaying b", cmd_wkb},
      {"accept", "run acceptance criteria 1-14", cmd_accept},
  };
  std::map<std::string, CLI::App*> apps;
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    apps[s.name] = sub;
    numeric(sub, "--problem", "problem", "registered problem id");
    numeric(sub, "--n-points", "grid.n_points", "grid points");
    numeric(sub, "--half-length", "grid.half_length", "box half length L");
    numeric(sub, "--eps", "eps", "artificial viscosity");
    numeric(sub, "--t-final", "t_final", "final time");
    numeric(sub, "--samples", "samples", "stored times");
  }
  numeric(apps["energy"], "--eps-list", "eps_list", "comma separated eps values");
  numeric(apps["eps-sweep"], "--eps-list", "eps_list", "comma separated eps values");
  numeric(apps["kappa-uniform"], "--eps-list", "eps_list", "comma separated eps values");
  numeric(apps["kappa-uniform"], "--kappa-list", "kappa_list", "comma separated kappa values");
  numeric(apps["bona-smith"], "--kappa-list", "kappa_list", "comma separated kappa values");
  numeric(apps["bona-smith"], "--data", "data", "gaussian, threshold or highpass");
  numeric(apps["illposed"], "--xi-min", "xi_min", "smallest cutoff");
  numeric(apps["illposed"], "--xi-max", "xi_max", "largest cutoff");
  numeric(apps["illposed"], "--s", "s", "Sobolev index");
  numeric(apps["wkb"], "--a-target", "a_target", "amplification target");
  numeric(apps["wkb"], "--xis", "xis", "comma separated frequencies");
  numeric(apps["accept"], "--only", "only", "comma separated criterion numbers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  const Sub* chosen = nullptr;
  for (const Sub& s : subs)
    if (apps[s.name]->parsed()) chosen = &s;

  try {
    Config cfg = config_path.empty() ? Config{} : Config::load(config_path);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects KEY=VALUE, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto& [k, v] : overrides) cfg.set(k, v);
    if (jobs) cfg.set("jobs", std::to_string(jobs));
    if (app.count("--seed")) cfg.set("seed", std::to_string(seed));
    if (!out_dir.empty()) cfg.set("out", out_dir);
    cfg.require_known(kKnownKeys, {"param."});

    Context ctx;
    ctx.exp = experiment_from(cfg, chosen->name);
    // Defaults for the studies that build their own grid.
    static const std::map<std::string, std::size_t> own_grid = {{"illposed", 16384}, {"wkb", 1024}, {"bona-smith", 4096}};
    if (auto it = own_grid.find(chosen->name); it != own_grid.end() && !cfg.has("grid.n_points"))
      ctx.exp.grid.n_points = it->second;
    ctx.hash = ctx.exp.config_hash();
    ctx.out = ctx.exp.out_dir;
    fs::create_directories(ctx.out);
    return chosen->run(ctx);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
}
