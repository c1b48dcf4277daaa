#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qkdv/coefficients.hpp"
#include "qkdv/error.hpp"
#include "qkdv/gauge.hpp"
#include "qkdv/problems.hpp"
#include "qkdv/spectral.hpp"

using namespace qkdv;

// Derivatives of -N (arctan x + pi/2) from sympy.
TEST(Gauge, PhiAndDerivatives) {
  EXPECT_NEAR(gauge_phi(2.0, 1.0), -4.7123889803846899, 1e-15);
  EXPECT_NEAR(gauge_dphi(2.0, 1.0), -1.0, 1e-15);
  EXPECT_NEAR(gauge_d2phi(2.0, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(gauge_d3phi(2.0, 1.0), -1.0, 1e-15);
  EXPECT_NEAR(gauge_phi(0.5, -3.0), -0.16087527719832110, 1e-15);
  EXPECT_NEAR(gauge_dphi(0.5, -3.0), -0.05, 1e-15);
  EXPECT_NEAR(gauge_d2phi(0.5, -3.0), -0.03, 1e-15);
  EXPECT_NEAR(gauge_d3phi(0.5, -3.0), -0.026, 1e-15);
}

TEST(Gauge, StateRoundTrip) {
  const GridSpec g{40.0, 256, 2};
  const GaugeData gd = build_gauge(g, 3.0);
  EXPECT_NEAR(gd.sup_abs_phi(), 3.0 * std::numbers::pi, 0.1);
  const Field u = gaussian(g, 1.0, 2.0);
  const Field back = gauge_state(gauge_state(u, gd, GaugeDirection::forward), gd, GaugeDirection::inverse);
  EXPECT_LT(l2_norm(back - u), 1e-13);
}

TEST(Gauge, ConjugationIdentity) {
  for (const char* id : {"varcoef", "system2"}) {
    const Problem p = make_problem(id);
    const AssumptionConstants k = compute_constants(p.coeffs, p.grid, 1.0, 0.0);
    const GaugeData gd = build_gauge(p.grid, k.N);
    const CoefficientFields cf = freeze_linear(p.coeffs, p.grid, 0.0);
    for (double x0 : {-5.0, -2.0, 0.0})
      EXPECT_LT(conjugation_residual(cf, gd, gaussian(p.grid, 1.0, 1.5, x0)), 1e-8) << id << " " << x0;
  }
}

// A 1e-6 slip in the gauged zeroth-order coefficient must show up far above
// the 1e-8 tolerance.
TEST(Gauge, ConjugationDetectsWrongCoefficient) {
  const Problem p = make_problem("varcoef");
  const AssumptionConstants k = compute_constants(p.coeffs, p.grid, 1.0, 0.0);
  const GaugeData gd = build_gauge(p.grid, k.N);
  const CoefficientFields cf = freeze_linear(p.coeffs, p.grid, 0.0);
  CoefficientFields wrong = gauged_coefficients(cf, gd);
  for (double& x : wrong.d.data()) x += 1e-6;
  const Field v = gaussian(p.grid, 1.0, 1.5, -2.0);
  const Field lhs = apply_operator(cf, gauge_state(v, gd, GaugeDirection::inverse), 0.0);
  const Field rhs = gauge_state(apply_operator(wrong, v, 0.0), gd, GaugeDirection::inverse);
  EXPECT_GT(l2_norm(dealias(lhs - rhs)) / l2_norm(dealias(rhs)), 1e-8);
}

// For a = 1 and nothing else the gauge contributes B = 6 phi' = -6N / (1 + x^2).
TEST(Gauge, AiryEnergyMatrix) {
  const Problem p = make_problem("airy");
  const double N = 2.0;
  const GaugeData gd = build_gauge(p.grid, N);
  const CoefficientFields cf = freeze_linear(p.coeffs, p.grid, 0.0);
  const EnergyMatrices e = energy_matrices(cf, gauged_coefficients(cf, gd), gd);
  for (std::size_t j = 0; j < p.grid.n_points; j += 17) {
    const double x = p.grid.x(j);
    EXPECT_NEAR(e.B.entry(j, 0, 0), -6.0 * N / (1.0 + x * x), 1e-12);
  }
  const SignReport s = energy_sign_check(e, 100.0);
  EXPECT_NEAR(s.max_weighted_B, -12.0, 1e-12);
  EXPECT_TRUE(s.negativity);
}

TEST(Gauge, SignCheckOnCompliantProblems) {
  for (const char* id : {"varcoef", "system2"}) {
    const Problem p = make_problem(id);
    const AssumptionConstants k = compute_constants(p.coeffs, p.grid, 1.0, 0.0);
    const GaugeData gd = build_gauge(p.grid, k);
    const CoefficientFields cf = freeze_linear(p.coeffs, p.grid, 0.0);
    EXPECT_TRUE(energy_sign_check(energy_matrices(cf, gauged_coefficients(cf, gd), gd), k.A).pass()) << id;
  }
}

TEST(Coefficients, Dispersive) {
  const Problem airy = make_problem("airy");
  EXPECT_DOUBLE_EQ(check_dispersive(airy.coeffs, 1.0).lambda, 1.0);
  const Problem q = make_problem("quasilinear");
  EXPECT_DOUBLE_EQ(check_dispersive(q.coeffs, 2.0).lambda, 1.0);

  CoefficientSet bad = airy.coeffs;
  bad.a = [](double, double, std::span<const double>) { return Matrix::Constant(1, 1, -1.0); };
  EXPECT_THROW(check_dispersive(bad, 1.0), EllipticityError);
  EXPECT_LT(probe_dispersive(bad, 1.0).lambda, 0.0);
}

TEST(Coefficients, ClosedFormMatchesDifferences) {
  const Problem q = make_problem("quasilinear");
  CoefficientSet numeric = q.coeffs;
  numeric.closed_form = nullptr;
  const double z[] = {0.7, 0.1, -0.2};
  const Partial p{0, 0, 0, -1};
  EXPECT_NEAR(numeric.partial(Coef::a, 0.0, 0.0, z, p)(0, 0), q.coeffs.partial(Coef::a, 0.0, 0.0, z, p)(0, 0), 1e-8);
  EXPECT_DOUBLE_EQ(q.coeffs.partial(Coef::a, 0.0, 0.0, z, p)(0, 0), 1.4);
}

TEST(Coefficients, TEpsFormula) {
  // 0.1^3 / (4 * 3 * 2)^4
  EXPECT_NEAR(t_eps_formula(0.1, 3.0, 1.0), 3.014081790123457e-09, 1e-22);
  EXPECT_DOUBLE_EQ(t_eps_formula(10.0, 1e-6, 0.0), 0.5);
}

TEST(Coefficients, UnknownProblem) {
  EXPECT_THROW(make_problem("nope"), UsageError);
  EXPECT_THROW(make_problem("airy", {{"bogus", 1.0}}), UsageError);
}

TEST(Coefficients, TimeReversal) {
  const Problem p = make_problem("varcoef");
  const CoefficientSet r = time_reversed(p.coeffs);
  const double z[] = {0.0, 0.0, 0.0};
  EXPECT_NEAR(r.value(Coef::a, 1.3, 0.0, z)(0, 0), p.coeffs.value(Coef::a, -1.3, 0.0, z)(0, 0), 1e-15);
  EXPECT_NEAR(r.value(Coef::b, 1.3, 0.0, z)(0, 0), -p.coeffs.value(Coef::b, -1.3, 0.0, z)(0, 0), 1e-15);
}
