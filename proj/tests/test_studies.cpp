#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qkdv/convergence.hpp"
#include "qkdv/counterexamples.hpp"
#include "qkdv/error.hpp"
#include "qkdv/problems.hpp"
#include "qkdv/rate_study.hpp"
#include "qkdv/spectral.hpp"

using namespace qkdv;

TEST(RateStudy, ExactPowerLaw) {
  const std::vector<double> x = geometric_sequence(1.0, 0.5, 5);
  ASSERT_EQ(x.size(), 5u);
  EXPECT_DOUBLE_EQ(x[4], 0.0625);
  std::vector<double> y;
  for (double v : x) y.push_back(2.0 * std::pow(v, 3.0));
  const RateStudy r = fit_rate("eps", "l2", x, y);
  EXPECT_NEAR(r.slope, 3.0, 1e-12);
  EXPECT_NEAR(r.intercept, std::log(2.0), 1e-12);
  EXPECT_NEAR(r.residual, 0.0, 1e-12);
  EXPECT_NEAR(r.min_local_slope(), 3.0, 1e-12);
}

TEST(RateStudy, Errors) {
  EXPECT_THROW(fit_rate("eps", "l2", {1, 2, 3}, {1, 2, 3}), InsufficientDataError);
  EXPECT_THROW(fit_rate("eps", "l2", {1, 2, 3, 4}, {1, 0, 3, 4}), InsufficientDataError);
  const RateStudy noisy = fit_rate("eps", "l2", {1, 2, 4, 8}, {1, 10, 1, 10});
  EXPECT_THROW(require_conclusive(noisy, 0.1, "refine"), InconclusiveRateError);
}

TEST(Mollifier, Profile) {
  EXPECT_EQ(mollifier_profile(0.0), 1.0);
  EXPECT_EQ(mollifier_profile(1.0), 1.0);
  EXPECT_EQ(mollifier_profile(2.0), 0.0);
  EXPECT_EQ(mollifier_profile(5.0), 0.0);
  double prev = 1.0;
  for (double r = 1.0; r <= 2.0; r += 0.05) {
    EXPECT_LE(mollifier_profile(r), prev);
    prev = mollifier_profile(r);
  }
  EXPECT_THROW(MollifierSpec{0.0}.validate(), Error);
  EXPECT_THROW(MollifierSpec{1.5}.validate(), Error);
}

// <xi>^{-p} with p = 14.55 sits 0.05 above the H^14 threshold, so
// ||u_kappa||_{H^{14+j}} grows like kappa^{-(j - 0.05)}.
TEST(BonaSmith, ThresholdGrowthSlopes) {
  const GridSpec g{40.0, 8192, 1};
  const BonaSmithReport r =
      bona_smith_rates(threshold_spectrum(g, 14.55), 14, {1, 2, 3}, geometric_sequence(0.125, 0.5, 5));
  ASSERT_EQ(r.growth.size(), 3u);
  for (int j = 1; j <= 3; ++j) EXPECT_NEAR(r.growth[j - 1].slope, -(j - 0.05), 0.02) << j;
}

TEST(BonaSmith, MollifiedDataIsIdentityBelowCutoff) {
  const GridSpec g{std::numbers::pi, 64, 1};
  const Field f = Field::from_function(g, [](std::size_t, double x) { return std::cos(3 * x); });
  EXPECT_LT(l2_norm(mollify_data(f, {0.25}) - f), 1e-14);
  EXPECT_LT(l2_norm(mollify_data(f, {1.0})), 1e-14);
}

TEST(EpsConvergence, FirstOrderInEps) {
  const Problem q = make_problem("quasilinear");
  Problem p = q;
  p.grid = GridSpec{20.0, 256, 1};
  EpsConvergenceOptions o;
  o.t_final = 0.05;
  o.samples = 3;
  const auto r = eps_convergence(p.coeffs, gaussian(p.grid, 0.5, 1.5), {}, {0.04, 0.02, 0.01, 0.005}, o);
  EXPECT_NEAR(r.l2.slope, 1.0, 0.05);
  EXPECT_LT(r.l2.residual, 0.1);
  EXPECT_NEAR(r.interpolated.slope, 1.0 / 14.0, 0.01);
}

// d/dt int_0^t b(x + s) ds for b = <x>^{-2} is arctan(x + t) - arctan(x).
TEST(Wkb, CharacteristicIntegral) {
  const Profile b = [](double x) { return 1.0 / (1.0 + x * x); };
  EXPECT_NEAR(characteristic_integral(b, 0.3, 2.0), 0.86921219177553855, 1e-13);
  EXPECT_NEAR(characteristic_integral([](double) { return 1.0; }, 5.0, 2.5), 2.5, 1e-14);
}

TEST(Wkb, ResidualIsSmall) {
  const GridSpec g{40.0, 4096, 1};
  const Field v0 = wkb_bump(g, 10.0, 4.0);
  EXPECT_NEAR(l2_norm(v0), 1.0, 1e-13);
  for (double xi : {2.0, 8.0}) {
    const double tau = 5.0 / (3.0 * std::pow(xi, 4));
    EXPECT_LT(wkb_residual([](double) { return 1.0; }, xi, v0, tau), 1e-6) << xi;
  }
}

TEST(Wkb, MizohataCrossing) {
  const MizohataReport r =
      mizohata_violation_demo(1.0, 10.0, {2, 4, 8, 16, 32, 64, 128, 256}, GridSpec{40.0, 1024, 1}, 32.0);
  EXPECT_NEAR(r.t0, 6.0 * std::log(30.0), 1e-12);
  EXPECT_NEAR(r.closed_form_amplification, std::exp(2.0 * std::log(30.0)), 1e-9);
  EXPECT_GT(r.crossing_xi, 0.0);
  EXPECT_LT(r.amplification_error, 1e-2);
  for (const WkbRun& w : r.decaying) EXPECT_LT(w.ratio, 10.0);
}

TEST(Jordan, ExactSolution) {
  const GridSpec g{std::numbers::pi, 32, 2};
  SpectralField u0(g);
  u0(1, 2) = cplx(1.0, 0.0);  // xi = 2 in the second component
  u0(1, 30) = cplx(1.0, 0.0);
  const SpectralField u = jordan_exact(u0, 1.0, 0.5);
  EXPECT_NEAR(std::abs(u(0, 2)), 8.0 * 0.5, 1e-14);
  EXPECT_NEAR(std::abs(u(1, 2)), 1.0, 1e-14);
  const SpectralField c = symmetric_exact(u0, 1.0, 0.5);
  EXPECT_NEAR(std::norm(c(0, 2)) + std::norm(c(1, 2)), 1.0, 1e-14);
}

// ||u(t)||_{H^s}^2 ~ delta^2 t^2 sum_{|xi| < Xi} xi^6 <xi>^{-2}, so the norm grows like Xi^{5/2}.
TEST(Jordan, GrowthRate) {
  const JordanStudy st = jordan_growth_study(GridSpec{40.0, 16384, 2}, 3, 1.0, 1.0, {32, 64, 128, 256});
  EXPECT_NEAR(st.growth.slope, 2.5, 0.01);
  EXPECT_LT(st.control_spread, 0.01);
  EXPECT_NEAR(st.runs.back().norm_0, std::sqrt(std::numbers::pi), 0.02 * std::sqrt(std::numbers::pi));
  EXPECT_THROW(jordan_growth_study(GridSpec{40.0, 1024, 2}, 3, 1.0, 1.0, {32, 64, 128, 256}), DomainError);
}
