#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qkdv/grid.hpp"
#include "qkdv/rate_study.hpp"

namespace qkdv {

// Exact solution of d_t u + [[1, delta], [0, 1]] u''' = 0 mode by mode:
//   u1^ = e^{i xi^3 t} (u01^ + delta i xi^3 t u02^),  u2^ = e^{i xi^3 t} u02^.
// u0hat must have two components.
SpectralField jordan_exact(const SpectralField& u0hat, double delta, double t);

// Same for the symmetric control [[1, delta], [delta, 1]], whose flow is unitary.
SpectralField symmetric_exact(const SpectralField& u0hat, double delta, double t);

// (0, c <xi>^{-s-1}) on |xi| <= cutoff, with c chosen so that
// ||u0||_{H^s} -> sqrt(pi) as the cutoff grows.
SpectralField jordan_data(const GridSpec& grid, int s, double cutoff);

struct JordanRun {
  double delta = 1.0;
  int s = 0;
  double cutoff = 0.0;
  double t = 0.0;
  double norm_t = 0.0;  // ||u(t)||_{H^s}
  double norm_0 = 0.0;  // ||u0||_{H^s}
};

struct JordanStudy {
  std::vector<JordanRun> runs;
  std::vector<JordanRun> control;  // symmetric top coefficient, same data
  RateStudy growth;                // ||u(t)||_{H^s} against the cutoff
  double control_spread = 0.0;     // (max - min) / max of the control norms
};

// Every cutoff must stay below the grid Nyquist wavenumber (DomainError).
JordanStudy jordan_growth_study(const GridSpec& grid, int s, double delta, double t,
                                const std::vector<double>& cutoffs);

using Profile = std::function<double(double)>;

// int_0^t b(x + s) ds by adaptive Gauss-Kronrod quadrature.
double characteristic_integral(const Profile& b, double x, double t);

// Smooth bump exp(-1 / (1 - ((x - center) / width)^2)), normalized to unit L2 on the grid.
Field wkb_bump(const GridSpec& grid, double center, double width);

struct WkbSample {
  Field u;   // real and imaginary parts of e^{i phi} v
  Field f;   // real and imaginary parts of the forcing
  Field v;   // real amplitude
  double v_norm = 0.0;
  double f_norm = 0.0;
};

// v(x, tau) = exp(xi^4 int_0^tau b(x + 3 xi^4 s) ds) v0(x + 3 xi^4 tau) with
// phi = x xi^2 + tau xi^6 and f = e^{i phi}[3i xi^2 v'' + v''' + 2 b i xi^2 v' + b v''].
// v0 is sampled on a single-component grid; the outputs have two components.
// Throws DomainError when the transported support leaves the box.
WkbSample wkb_solution(const Profile& b, double xi, const Field& v0, double tau);

// Relative residual of d_t u + u''' + b u'' - f at time tau, with the phase
// derivatives and d_tau v in closed form and the x-derivatives of v on the grid.
double wkb_residual(const Profile& b, double xi, const Field& v0, double tau);

struct WkbRun {
  std::string b_name;
  double xi = 0.0;
  double t0 = 0.0;           // rescaled time
  double tau0 = 0.0;         // t0 / (3 xi^4)
  double sup_u = 0.0;        // sup over [0, tau0] of ||u||_{L2}
  double u0_norm = 0.0;
  double forcing_l1l2 = 0.0; // int_0^{tau0} ||f||_{L2}
  double ratio = 0.0;        // sup_u / (u0_norm + forcing_l1l2)
  double amplification = 0.0;  // ||v(tau0)|| / ||v0||
};

// tau0 is sampled with `samples` points (odd); Simpson's rule for the L1 part.
WkbRun wkb_run(const Profile& b, const std::string& b_name, double xi, const Field& v0, double t0,
               std::size_t samples = 65);

struct MizohataReport {
  double a_target = 0.0;
  double t0 = 0.0;                  // 6 log(3 A_target)
  std::vector<WkbRun> violating;    // b = const
  std::vector<WkbRun> decaying;     // b = <x>^{-2}
  double closed_form_amplification = 0.0;  // e^{b0 t0 / 3}
  double amplification_error = 0.0;        // relative, largest xi
  double crossing_xi = -1.0;               // first xi with ratio > A_target, -1 if none
  double decaying_spread = 0.0;            // (max - min) / max of the decaying ratios with xi >= spread_from_xi
};

// t0 from the threshold int_0^{t0} b0 ds = 6 log(3 A). v0 is a unit bump at
// x = t0 / 2 so that the transported support stays inside the box.
MizohataReport mizohata_violation_demo(double b0, double a_target, const std::vector<double>& xis,
                                       const GridSpec& grid, double spread_from_xi = 0.0);

}  // namespace qkdv
