#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qkdv/coefficients.hpp"
#include "qkdv/grid.hpp"
#include "qkdv/linear.hpp"
#include "qkdv/rate_study.hpp"

namespace qkdv {

// phi(r) = 1 on [0, 1], 0 on [2, inf), smooth monotone step in between.
double mollifier_profile(double r);

struct MollifierSpec {
  double kappa = 1.0;  // in (0, 1]
  void validate() const;
};

// hat(u)(xi) phi(kappa |xi|).
Field mollify_data(const Field& u0, const MollifierSpec& spec);
SpectralField mollify_data(const SpectralField& u0, const MollifierSpec& spec);
std::vector<Field> mollify_data(const std::vector<Field>& series, const MollifierSpec& spec);
ForcingFn mollify_forcing(const ForcingFn& f, const MollifierSpec& spec);

// Coefficients scale * <xi>^{-p} on every component.
SpectralField threshold_spectrum(const GridSpec& grid, double p, double scale = 1.0);

// Data whose regularity sits exactly at a chosen Sobolev threshold and whose
// spectrum starts above xi0: the kernel of <xi>^{-p} (1 - phi(|xi|/xi0)) moved
// to x0, built on a box four times larger, cut down by exp(-x^2/sigma^2) and
// restricted to the grid. Peak amplitude before windowing is `amplitude`.
struct ThresholdDataSpec {
  double p = 8.55;
  double xi0 = 1.5;
  double x0 = 4.0;
  double sigma = 6.0;
  double amplitude = 1.0;
};
Field highpass_threshold_data(const GridSpec& grid, const ThresholdDataSpec& spec);

struct BonaSmithReport {
  bool weighted = false;
  int s_base = 0;
  std::vector<int> j_list;
  std::vector<RateStudy> growth;  // ||u_{0,kappa}||_{H^{s+j}} (weighted: ||<x>^2 u_{0,kappa}||_{H^{s+j}})
  RateStudy approximation;        // ||u_{0,kappa} - u_0||_{L2} (weighted: ||<x>^2 (...)||_{L2})
};

// Unweighted study on analytically given spectral data.
BonaSmithReport bona_smith_rates(const SpectralField& u0, int s_max, const std::vector<int>& j_list,
                                 const std::vector<double>& kappas);
// Weighted study on sampled data.
BonaSmithReport weighted_bona_smith_rates(const Field& u0, int s_base, const std::vector<int>& j_list,
                                          const std::vector<double>& kappas);

// Linear sets go through solve_linear, state-dependent ones through
// solve_quasilinear.
Trajectory evolve(const CoefficientSet& coeffs, const Field& u0, const ForcingFn& f, const SolveConfig& config);

// sup over common sample times of ||a(t) - b(t)||_{H^s} (s = 0: plain L2).
double sup_difference(const Trajectory& a, const Trajectory& b, double s);
double sup_norm(const Trajectory& a, double s);

struct EpsConvergenceOptions {
  double t_final = 0.1;
  std::size_t samples = 11;
  int s_max = 14;
  std::size_t jobs = 1;
};

struct EpsConvergenceReport {
  RateStudy l2;            // sup_t ||u^eps - u^{eps/2}||_{L2}
  RateStudy interpolated;  // ||d||_{L2}^{1/s} (2 M_high)^{(s-1)/s}
  RateStudy high;          // measured sup_t ||u^eps - u^{eps/2}||_{H^{s-1}}
  double m_high = 0.0;     // max over runs of sup_t ||u||_{H^s}
  bool high_below_bound = false;
  double reference_eps = 0.0;  // smallest eps solved; its run is the eps -> 0 stand-in
  Trajectory reference;
};

// eps_list must be decreasing; every eps and eps/2 is solved.
EpsConvergenceReport eps_convergence(const CoefficientSet& coeffs, const Field& u0, const ForcingFn& f,
                                     const std::vector<double>& eps_list, const EpsConvergenceOptions& opts);

struct KappaUniformOptions {
  double t_final = 0.05;
  std::size_t samples = 6;
  int s_max = 14;
  double noise = 0.1;  // tolerated relative increase before a profile is flagged
  std::size_t jobs = 1;
};

struct KappaUniformReport {
  std::vector<double> kappas;  // decreasing
  std::vector<double> epss;
  std::vector<std::vector<double>> diff_l2;    // [eps][kappa], sup_t ||u^eps - u_kappa^eps||_{L2}
  std::vector<std::vector<double>> diff_high;  // same in H^{s_max}
  std::vector<double> uniform_l2;              // max over eps, per kappa
  std::vector<double> uniform_high;
  bool columns_decreasing = false;
  bool uniform_decreasing = false;
  std::vector<std::string> flags;
  // The three pieces of the difference estimate, max over eps.
  std::vector<double> i1;        // ||u0 - u0_kappa||_{L2}
  std::vector<double> i2;        // ||f - f_kappa||_{L1 L2}
  std::vector<double> i3;        // sup_t ||(N_{u_kappa} - N_u) u_kappa||_{L2}
  std::vector<double> i3_small;  // sup_t of the largest coefficient difference
  std::vector<double> i3_large;  // sup_t ||u_kappa||_{H^{s_max+3}}
  double i3_small_slope = 0.0;
  double i3_large_slope = 0.0;
};

KappaUniformReport kappa_uniform_study(const CoefficientSet& coeffs, const Field& u0, const ForcingFn& f,
                                       const std::vector<double>& kappas, const std::vector<double>& epss,
                                       const KappaUniformOptions& opts);

struct GrowthOptions {
  double eps = 0.1;
  int s_base = 8;
  std::vector<int> j_list{1, 2, 3};
  std::size_t jobs = 1;
};

// sup over one Picard window of ||u_kappa^eps||_{H^{s_base + j, 2}} against
// kappa, one study per j.
std::vector<RateStudy> mollified_growth_study(const CoefficientSet& coeffs, const Field& u0,
                                              const std::vector<double>& kappas, const GrowthOptions& opts);

struct DependenceRow {
  double data_difference = 0.0;      // ||u0_m - u0||_Y
  double solution_difference = 0.0;  // sup_t ||u_m^eps - u^eps||_{H^{8,2}}
  double lipschitz = 0.0;            // ratio of the two
  double viscosity_m = 0.0;          // sup_t ||u_m^eps - u_m^{eps/2}||_{L2}
  double viscosity_ref = 0.0;        // sup_t ||u^eps - u^{eps/2}||_{L2}
};

struct DependenceReport {
  std::vector<DependenceRow> rows;
  bool monotone = false;  // solution differences nonincreasing up to the noise factor
  long flagged_index = -1;
};

DependenceReport continuous_dependence(const CoefficientSet& coeffs, const std::vector<Field>& data_sequence,
                                       const Field& reference, const SolveConfig& config, double noise = 0.1,
                                       std::size_t jobs = 1);

}  // namespace qkdv
