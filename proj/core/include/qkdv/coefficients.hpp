#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qkdv/grid.hpp"

namespace qkdv {

using Matrix = Eigen::MatrixXd;

enum class Coef { a, b, c, d };

// Number of z-arguments each coefficient takes for a system of size n:
// a, b see (u, u', u''), c sees (u, u'), d sees u.
std::size_t z_arity(Coef which, std::size_t n);

// A request for d_t^dt d_x^dx d_{z_k} (dz = -1 for no z-derivative).
struct Partial {
  int dx = 0;
  int dt = 0;
  int dz = -1;
  int dz2 = -1;  // second z index, for mixed second z-partials
};

struct CoefficientSet {
  using Eval = std::function<Matrix(double x, double t, std::span<const double> z)>;
  using PartialEval =
      std::function<bool(Coef, double x, double t, std::span<const double> z, const Partial&, Matrix& out)>;

  std::size_t n = 1;
  std::string name;
  Eval a, b, c, d;
  // Optional closed forms. Returns false when it does not know the requested
  // partial, in which case central differences are used.
  PartialEval closed_form;
  // Optional regularity bound C_{J,M}.
  std::function<double(int J, double M)> c_jm;
  bool time_dependent = false;
  bool state_dependent = false;

  const Eval& eval(Coef which) const;
  Matrix value(Coef which, double x, double t, std::span<const double> z) const;
  // Closed form if supplied, else central differences (step 1e-5 for first
  // order, larger for higher orders so truncation and roundoff balance).
  Matrix partial(Coef which, double x, double t, std::span<const double> z, const Partial& p) const;
  void validate() const;
};

// Coefficients frozen along a state at a fixed time.
struct CoefficientFields {
  GridSpec grid;
  double t = 0.0;
  MatrixField a, b, c, d;

  std::size_t n() const { return a.dim(); }
  bool all_finite() const;
};

// Arguments (u, u', u'') of the coefficients along a state, sampled on the grid.
struct StateJet {
  GridSpec grid;
  std::vector<Field> derivs;  // derivs[k] = d_x^k u, k = 0..2
  std::vector<double> z(Coef which, std::size_t j) const;
};
StateJet state_jet(const Field& state);

CoefficientFields freeze(const CoefficientSet& coeffs, const Field& state, double t);
// Linear part: coefficients at the zero state.
CoefficientFields freeze_linear(const CoefficientSet& coeffs, const GridSpec& grid, double t);

struct DispersiveCheck {
  bool is_symmetric = true;
  double lambda = 0.0;
  std::size_t lattice_points = 0;
};

struct LatticeSpec {
  std::size_t x_points = 64;
  std::size_t z_points = 5;    // per z-axis
  double half_length = 40.0;   // x-range [-L, L]
};

// Minimum eigenvalue of sym(a(x, 0, z)) over the x/z lattice. Throws
// EllipticityError when it is not positive.
DispersiveCheck check_dispersive(const CoefficientSet& coeffs, double m_box, const LatticeSpec& lattice = {});
// Same, without throwing; lambda may be <= 0.
DispersiveCheck probe_dispersive(const CoefficientSet& coeffs, double m_box, const LatticeSpec& lattice = {});

struct AssumptionConstants {
  double lambda = 0.0;
  double c0_tilde = 0.0;  // time-0 bounds
  double c1 = 0.0;        // time-dependent bounds
  double c0 = 0.0;        // decay of the linear parts
  double delta = 1.0;
  double N = 0.0;         // gauge strength
  double A = 0.0;
  double T = 0.0;         // dyadic window on which the time-0 bounds survive doubling
  double R = 1.0;
  double M = 0.0;
  std::function<double(int J, double M)> c_jm;
  std::string lattice;

  // T_eps = min(eps^3 / [4 C_{11,M} (1 + M^11)]^4, 1/2)
  double t_eps(double eps) const;
};

double t_eps_formula(double eps, double c11m, double M);

struct ConstantsOptions {
  LatticeSpec lattice;
  double m_box = -1.0;         // z-box for ellipticity; defaults to R
  std::size_t time_samples = 9;
  double sup_limit = 1e12;
};

// Sampled constants for the linear part (coefficients at the zero state) of
// a problem on the given grid. M <= 0 selects M = (16A + 2)R.
AssumptionConstants compute_constants(const CoefficientSet& coeffs, const GridSpec& grid, double R, double M,
                                      const ConstantsOptions& opts = {});
// Constants for the linear system obtained by freezing along a state.
AssumptionConstants compute_constants_frozen(const CoefficientSet& coeffs, const Field& state, double R,
                                             double M, const ConstantsOptions& opts = {});

// Named pieces of (L2)/(L3) at one time, for reporting.
struct BoundTerms {
  double regularity = 0.0;      // ||a||_{B^3} + ||b||_{B^2} + ||c||_{B^1} + ||d||_{L^inf}
  double decay_symmetric = 0.0; // ||<x>^2 a'|| + ||<x>^2 b||
  double decay_antisym = 0.0;   // ||<x> (b^dag)'|| + ||<x> c^dag||
  double min_eig_a = 0.0;
};
BoundTerms bound_terms(const CoefficientFields& cf);

// Sampled C_{J,M}: max over pure x- and single-axis z-derivatives up to
// order min(J, 6) on the lattice.
double sampled_c_jm(const CoefficientSet& coeffs, int J, double M, const LatticeSpec& lattice = {});

}  // namespace qkdv
