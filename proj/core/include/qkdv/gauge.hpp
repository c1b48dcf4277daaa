#pragma once

#include <cstddef>
#include <vector>

#include "qkdv/coefficients.hpp"
#include "qkdv/grid.hpp"

namespace qkdv {

// phi(x) = -N (arctan x + pi/2), the delta = 1 gauge, with closed-form derivatives.
struct GaugeData {
  GridSpec grid;
  double N = 0.0;
  double delta = 1.0;
  std::vector<double> phi, dphi, d2phi, d3phi;
  std::vector<double> exp_phi, exp_neg_phi;

  double sup_abs_phi() const;
};

double gauge_phi(double N, double x);
double gauge_dphi(double N, double x);
double gauge_d2phi(double N, double x);
double gauge_d3phi(double N, double x);

GaugeData build_gauge(const GridSpec& grid, double N);
GaugeData build_gauge(const GridSpec& grid, const AssumptionConstants& constants);

enum class GaugeDirection { forward, inverse };

// forward: v = e^{-phi} u; inverse: u = e^{phi} v.
Field gauge_state(const Field& u, const GaugeData& g, GaugeDirection direction);

// Coefficients of e^{-phi} L (e^{phi} .) for L = a d^3 + b d^2 + c d + d.
CoefficientFields gauged_coefficients(const CoefficientFields& cf, const GaugeData& g);

// L v = a v''' + b v'' + c v' + d v with coefficients applied pointwise. The
// derivatives drop coefficients below floor_rel of v's peak (see derivative()),
// which is right for smooth states but not when L v is much smaller than v.
Field apply_operator(const CoefficientFields& cf, const Field& v, double floor_rel = 1e-14);
// e^{-phi} L (e^{phi} v) by direct composition: e^{phi} v decays wherever v
// does, so L is applied to it spectrally, without the roundoff floor.
Field conjugated_operator(const CoefficientFields& cf, const GaugeData& g, const Field& v);

// ||L(e^{phi} v) - e^{phi} L_g v|| / ||e^{phi} L_g v||, with both sides
// restricted to the 2/3 band and no roundoff floor. Comparing e^{-phi} L(e^{phi} v) with L_g v
// directly amplifies FFT roundoff near the right edge by up to e^{N pi}.
// Even here the FFT noise of v's derivatives (1e-16 of max|v|) is weighted by
// e^{phi}, so v must carry its e^{phi}-weighted mass well away from the far
// right of the box: a lone narrow bump at x = 5 with N = 15 reads as O(1).
double conjugation_residual(const CoefficientFields& cf, const GaugeData& g, const Field& v);

struct EnergyMatrices {
  GridSpec grid;
  double t = 0.0;
  MatrixField B, C, D;
};

// -2 int L_g v . v = int B v'.v' + int C v'.v + int D v.v for the gauged operator L_g.
//   B = -3a' + b + b^T + 6 phi' a
//   C = (b - b^T)' - (c - c^T) - 2 phi' (b - b^T)
//   D = a''' - sym(b~)'' + sym(c~)' - (d~ + d~^T)
EnergyMatrices energy_matrices(const CoefficientFields& cf, const CoefficientFields& gauged, const GaugeData& g);

// Quadratic form of the energy identity evaluated on a state.
double energy_form(const EnergyMatrices& e, const Field& v);

struct SignReport {
  double max_weighted_B = 0.0;  // max over x and unit directions of <x>^2 B xi.xi
  double sup_weighted_C = 0.0;  // sup_x <x> ||C||_2
  double sup_D = 0.0;           // sup_x ||D||_2
  double A = 0.0;
  bool negativity = false;      // max_weighted_B <= -2 + 1e-6
  bool c_bound = false;
  bool d_bound = false;
  bool pass() const { return negativity && c_bound && d_bound; }
};

SignReport energy_sign_check(const EnergyMatrices& e, double A, std::size_t directions = 16);

struct EnergyStep {
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};

struct EnergyReport {
  std::vector<EnergyStep> steps;
  double min_margin = 0.0;
  bool pass = false;
  // ||v(t)||^2 <= e^{At}(||v0||^2 + int_0^t |int g.v|)
  double gronwall_max_ratio = 0.0;
  bool gronwall_pass = false;
};

// v, g sampled at uniform times. g may be empty (no forcing).
EnergyReport energy_inequality_check(const std::vector<double>& times, const std::vector<Field>& v,
                                     const std::vector<Field>& g, double A);

struct SmoothingReport {
  double lhs = 0.0;         // ||<x>^{-1} <d> u||_{L^2_t L^2_x}
  double rhs = 0.0;         // A (||u0|| + ||<x> <d>^{-1} f||_{L^2_t L^2_x})
  double ratio = 0.0;
  double unweighted = 0.0;  // ||<d> u||_{L^2_t L^2_x}
  double unweighted_sup = 0.0;  // ||<d> u||_{L^inf_t L^2_x}
  bool pass = false;
};

SmoothingReport smoothing_functional(const std::vector<double>& times, const std::vector<Field>& u,
                                     const Field& u0, const std::vector<Field>& f, double A);

}  // namespace qkdv
