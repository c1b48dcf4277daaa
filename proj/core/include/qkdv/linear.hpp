#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "qkdv/coefficients.hpp"
#include "qkdv/grid.hpp"

namespace qkdv {

enum class Integrator { integrating_factor, imex };

struct SolveConfig {
  double eps = 0.0;
  double t_final = 1.0;
  double dt = 0.0;  // 0 selects min(0.5 h^3 / (max||a|| pi^3), 0.1 t_final)
  Integrator integrator = Integrator::integrating_factor;
  double fixed_point_tol = 1e-10;
  std::size_t max_substeps = 50'000'000;
  std::size_t samples = 101;  // stored times, both ends included
  bool check_residual = true;
};

struct Trajectory {
  SolveConfig config;
  GridSpec grid;
  std::vector<double> times;
  std::vector<Field> states;
  std::vector<Field> forcing;  // empty when unforced
  double dt_used = 0.0;
  std::size_t steps = 0;
  double max_residual = 0.0;  // relative PDE residual at stored interior times

  const Field& final_state() const { return states.back(); }
};

// Coefficients of a linear system as a function of time.
struct CoefficientProvider {
  std::function<CoefficientFields(double t)> at;
  bool time_dependent = false;
  // When set, coefficients are frozen along the current state at every
  // stage instead (quasilinear problems); `at` is then unused.
  std::function<CoefficientFields(double t, const Field& u)> at_state;
};
using ForcingFn = std::function<Field(double t)>;

// Linear part of a coefficient set (frozen at the zero state).
CoefficientProvider linear_provider(const CoefficientSet& cs, const GridSpec& grid);
CoefficientProvider constant_provider(const CoefficientFields& cf);

// e^{-eps t d^4} u0. t < 0 -> TimeDirectionError.
Field viscous_semigroup(const Field& u0, double eps, double t);

double stable_dt(const GridSpec& grid, double max_a_norm, double t_final);

// d_t u + a u''' + b u'' + c u' + d u = -eps u'''' + f, solved by a Lawson
// (integrating factor) RK4 around the constant symmetric a at the left box
// edge; the remainder is applied pointwise with 2/3-rule dealiasing.
Trajectory solve_linear(const CoefficientProvider& coeffs, const Field& u0, const ForcingFn& f,
                        const SolveConfig& config);
Trajectory solve_linear(const CoefficientSet& coeffs, const Field& u0, const ForcingFn& f, const SolveConfig& config);

// ||f||_{L^1_t L^2_x} by the trapezoid rule over stored samples.
double forcing_l1l2(const Trajectory& traj);

struct L2BoundReport {
  double sup_norm = 0.0;   // sup_t ||u(t)||
  double data_term = 0.0;  // ||u0|| + ||f||_{L^1 L^2}
  double sup_ratio = 0.0;  // sup_norm / (A data_term)
  bool pass = false;
};

L2BoundReport verify_l2_bound(const Trajectory& traj, const Field& u0, const AssumptionConstants& constants);

struct HeatReport {
  int s = 0;
  double ratio_a = 0.0;   // sup_t ||e^{-eps t d^4} u0||_{H^{s,2}} / ||u0||_{H^{s,2}}
  double ratio_b = 0.0;   // sup_t ||Duhamel||_{H^{s,2}} / ((T + (T/eps^3)^{1/4}) ||f||_{H^{s-3,2}})
  double factor_b = 0.0;  // T + (T/eps^3)^{1/4}
  double c_s = 0.0;
  bool pass_a = false;
  bool pass_b = false;
};

// Time-independent f; the Duhamel integral uses the closed form
// (1 - e^{-eps t xi^4}) / (eps xi^4) mode by mode.
HeatReport heat_smoothing_check(const Field& u0, const Field& f, double eps, double T, int s, double c_s,
                                std::size_t samples = 33);
// Runs the designated calibration problem and returns the largest ratio seen.
double calibrate_heat_constant(int s);
// Frozen result of calibrate_heat_constant for s in {4, 8}.
double heat_constant(int s);

}  // namespace qkdv
