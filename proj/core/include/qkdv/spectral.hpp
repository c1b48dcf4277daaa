#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "qkdv/grid.hpp"

namespace qkdv {

inline double japanese(double x) { return std::sqrt(1.0 + x * x); }

SpectralField forward_transform(const Field& f);
Field inverse_transform(const SpectralField& F);

// Fourier multiplier m(xi). m must satisfy m(-xi) = conj(m(xi)) so the result
// stays real; at the Nyquist mode the real part of the symmetrized symbol is used.
Field apply_multiplier(const Field& f, const std::function<cplx(double)>& m);
// With floor_rel > 0, coefficients below floor_rel * (largest coefficient of
// the component) are dropped in the same pass. A separate denoise() does not
// help here: its inverse transform puts fresh roundoff into every mode.
Field derivative(const Field& f, int order, double floor_rel = 0.0);
// <d_x>^s, i.e. multiplication by (1 + xi^2)^{s/2}.
Field bessel_multiplier(const Field& f, double s);
// Zeroes modes above 2/3 of the Nyquist wavenumber.
Field dealias(const Field& f);
// Zeroes coefficients below rel * (largest coefficient of that component),
// the same floor the Sobolev norms apply. Used before high-order derivatives.
Field denoise(const Field& f, double rel = 1e-14);

// Discrete L2 norm sqrt(h sum |f_j|^2) over all components.
double l2_norm(const Field& f);
// L2 norm of bessel_multiplier(f, s), computed in Fourier space. Coefficients
// below 1e-14 of the component's largest coefficient are treated as roundoff
// and skipped; otherwise high orders are dominated by amplified FFT noise.
double sobolev_norm(const Field& f, double s);

// ||a - b||_{H^s} with coefficients of the difference below 1e-14 of the
// larger of the two fields' peaks (per component) treated as roundoff. The
// floor of sobolev_norm(a - b) is relative to the difference itself and lets
// the solution's own roundoff through.
double difference_norm(const Field& a, const Field& b, double s);

// ||f||_{H^s} straight from the coefficients, with no roundoff floor. Meant
// for data given analytically in Fourier space.
double exact_sobolev_norm(const SpectralField& F, double s);

struct NormReport {
  int s = 0;
  int weight_order = 0;
  double value = 0.0;
  std::vector<std::pair<int, double>> terms;  // (j, ||<x>^{k-j} f||_{H^{s+3j}})
  bool boundary_warning = false;              // mass near the box edge, weight unreliable
};

// sum_{j=0}^{k} ||<x>^{k-j} f||_{H^{s+3j}}, k in {0, 1, 2}.
NormReport weighted_sobolev_norm(const Field& f, int s, int k);
// Shorthand for the H^{s,2} value.
double h_s2_norm(const Field& f, int s);

// Fraction of L2 mass in |x| > 0.9 L.
double boundary_mass_fraction(const Field& f);

// Single component helpers working on raw samples of one scalar series.
namespace series {
std::vector<cplx> half_spectrum(const GridSpec& g, std::span<const double> f);
std::vector<double> from_half_spectrum(const GridSpec& g, std::span<const cplx> F);
std::vector<double> derivative(const GridSpec& g, std::span<const double> f, int order, double floor_rel = 0.0);
std::vector<double> dealias(const GridSpec& g, std::span<const double> f);
// Pointwise product with 2/3-rule truncation of both factors and the result.
std::vector<double> dealiased_product(const GridSpec& g, std::span<const double> a,
                                      std::span<const double> b);
double sobolev_norm(const GridSpec& g, std::span<const double> f, double s);
}  // namespace series

}  // namespace qkdv
