#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qkdv/coefficients.hpp"
#include "qkdv/grid.hpp"
#include "qkdv/linear.hpp"

namespace qkdv {

// N_u(u) = a u''' + b u'' + c u' + d u with the coefficients frozen along u.
Field apply_N(const CoefficientSet& coeffs, const Field& u, double t);
// Same operator applied to w with the coefficients frozen along u.
Field apply_N_frozen(const CoefficientSet& coeffs, const Field& u, const Field& w, double t);

// ||u0||_{H^{8,2}} + ||f||_{L^1 H^{8,2}} + ||f||_{C^0 H^{4,2}} over the sampled
// times (trapezoid rule for the L^1 part). f may be empty.
double data_norm_y(const Field& u0, const ForcingFn& f, const std::vector<double>& times);

struct MoserReport {
  int s = 8;
  double M = 0.0;
  double ratio_a = 0.0;  // ||N(u)||_{H^{s-3,2}} / ((1 + M^{s+3}) ||u||_{H^{s,2}})
  double ratio_b = 0.0;  // same for N(u) - N(v) against ||u - v||_{H^{s,2}}
};

// s must be 8 or 9.
MoserReport moser_check(const CoefficientSet& coeffs, const Field& u, const Field& v, double M, int s,
                        double t = 0.0);

// d_t u + N_u(u) = -eps u'''' + f for state-dependent coefficients, with the
// same Lawson stepper as solve_linear and coefficients re-frozen at every stage.
Trajectory solve_quasilinear(const CoefficientSet& coeffs, const Field& u0, const ForcingFn& f,
                             const SolveConfig& config);

struct PicardConfig {
  double eps = 0.1;
  double t0 = 0.0;
  double window = 0.0;         // 0 selects practical_window()
  std::size_t nodes = 17;      // odd, at least 17
  double tol = 1e-10;          // relative, C^0 H^{8,2} surrogate
  std::size_t max_iterations = 40;
  double stall_ratio = 0.95;   // this many consecutive ratios above it -> ContractionError
  std::size_t stall_count = 3;
  double size_limit = 0.0;     // > 0: iterates above it in H^{8,2} -> BlowUpError
  double data_bound = 0.0;     // > 0: require ||(u0, f)||_Y < data_bound (AssumptionError)
};

struct DuhamelState {
  std::size_t iterations = 0;
  std::vector<double> differences;  // max over nodes of ||u_{k+1} - u_k||_{H^{8,2}}
  std::vector<double> ratios;       // differences[k] / differences[k - 1]
  double window = 0.0;
  double t_eps = 0.0;               // T_eps of the supplied constants, 0 if none were given
  double max_norm = 0.0;            // max over nodes of ||u||_{H^{8,2}} at the fixed point
  double idempotence = 0.0;         // ||Gamma u - u|| / ||u|| after convergence
  bool converged = false;
};

struct PicardResult {
  Trajectory trajectory;  // the fixed point at the quadrature nodes
  DuhamelState state;
};

// Largest window on which the Duhamel map (heat semigroup only) is expected
// to contract by 1/4: 0.25 / (max|a| xi_c^3) with xi_c the dealiased cutoff.
double practical_window(const CoefficientSet& coeffs, const Field& u0, double t0 = 0.0);

// Fixed point of Gamma u = e^{-eps t d^4} u0 + int_0^t e^{-eps (t - t') d^4} (f - N_u u)(t') dt'
// on [t0, t0 + window]. The integral is evaluated mode by mode with the
// exponential weight exact and the integrand interpolated quadratically
// between nodes.
PicardResult picard_solve(const CoefficientSet& coeffs, const Field& u0, const ForcingFn& f,
                          const PicardConfig& config, const AssumptionConstants* constants = nullptr);

struct ContinuationReport {
  Trajectory trajectory;      // window end points, t = 0 included
  std::size_t windows = 0;
  std::size_t total_iterations = 0;
  double max_ratio = 0.0;     // largest Picard difference ratio seen
  double bound = 0.0;         // 8 A R
  double max_norm = 0.0;      // sup over all nodes of ||u||_{H^{8,2}}
  double margin = 0.0;        // bound - max_norm
  bool bound_held = true;
  bool all_converged = true;
  double violation_time = -1.0;
};

// Repeated picard_solve windows until t_target, stopping early (with the
// time recorded) once ||u||_{H^{8,2}} exceeds 8AR.
ContinuationReport continuation_solve(const CoefficientSet& coeffs, const Field& u0, const ForcingFn& f,
                                      double t_target, const AssumptionConstants& constants,
                                      const PicardConfig& config);

// d^s N_u(u) = a d^{s+3}u + b^s d^{s+2}u + c^s d^{s+1}u + d^s d^s u + F^s.
// b^s uses the closed form; c^s and d^s are fitted pointwise by least squares
// against frozen-coefficient probes cos/sin(xi x); F^s is what remains.
struct DifferentiatedSystem {
  int s = 0;
  bool weighted = false;
  double eps = 0.0;
  MatrixField a, b, c, d;
  Field F;            // remainder
  Field E3;           // weighted only: [eps d^4 + a d^3 + b^s d^2 + c^s d, <x>^2] d^s u
  double decomposition_residual = 0.0;  // relative, should be roundoff
};

DifferentiatedSystem differentiate_system(const CoefficientSet& coeffs, const Field& u, double t, int s,
                                          bool weighted, double eps = 0.0);

struct AprioriRow {
  int s = 0;
  std::string inequality;  // "l2", "derivative" (d^s u in L2), "weighted" (<x>^2 d^s u in L2)
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

struct AprioriReport {
  std::vector<AprioriRow> rows;
  double sup_h82 = 0.0;  // sup_t ||u||_{H^{8,2}}
  double bound = 0.0;    // 8 A R
  bool pass = false;     // every ratio <= 1 + 1e-6 and sup_h82 <= bound
};

struct AprioriOptions {
  int s_max = 14;           // unweighted range 1..s_max
  int s_max_weighted = 8;   // weighted range 0..s_max_weighted
  double eps = 0.0;
  std::size_t stride = 1;   // use every stride-th stored time for the remainders
};

AprioriReport apriori_check(const CoefficientSet& coeffs, const Trajectory& traj, const AssumptionConstants& constants,
                            const AprioriOptions& opts = {});

}  // namespace qkdv
