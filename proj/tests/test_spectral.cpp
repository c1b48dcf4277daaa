#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qkdv/error.hpp"
#include "qkdv/problems.hpp"
#include "qkdv/spectral.hpp"

using namespace qkdv;

namespace {

// exp(-x^2/4): H^s norms from sigma^2 int (1 + k^2)^s exp(-2 k^2) dk, mpmath at 30 digits.
constexpr double kGaussH0 = 1.5832334870861595;
constexpr double kGaussH1 = 1.7701088506893441;
constexpr double kGaussH2 = 2.0566806299082542;
constexpr double kGaussH4 = 3.3483259427593158;
constexpr double kGaussH8 = 26.002605190424901;

// ||<x>^2 g||_{H^8} + ||<x> g||_{H^11} + ||g||_{H^14} for the same Gaussian,
// from sum_k binom(m, k) ||d^k f||^2 with sympy derivatives.
constexpr double kGaussH82 = 762216.66415050473;

Field test_gaussian(std::size_t n) { return gaussian(GridSpec{40.0, n, 1}, 1.0, std::sqrt(2.0)); }

}  // namespace

TEST(Grid, RejectsBadSpecs) {
  EXPECT_THROW((GridSpec{40.0, 511, 1}.validate()), Error);
  EXPECT_THROW((GridSpec{-1.0, 512, 1}.validate()), Error);
  EXPECT_NO_THROW((GridSpec{40.0, 512, 2}.validate()));
}

TEST(Grid, Wavenumbers) {
  const GridSpec g{std::numbers::pi, 16, 1};
  EXPECT_DOUBLE_EQ(g.wavenumber(1), 1.0);
  EXPECT_DOUBLE_EQ(g.wavenumber(15), -1.0);
  EXPECT_DOUBLE_EQ(g.nyquist(), 8.0);
  EXPECT_DOUBLE_EQ(g.x(0), -std::numbers::pi);
}

TEST(Spectral, RoundTrip) {
  const Field f = test_gaussian(256);
  const Field back = inverse_transform(forward_transform(f));
  for (std::size_t j = 0; j < f.points(); ++j) EXPECT_NEAR(back(0, j), f(0, j), 1e-15);
}

TEST(Spectral, DerivativeOfTrigPolynomial) {
  const GridSpec g{std::numbers::pi, 64, 1};
  const Field f = Field::from_function(g, [](std::size_t, double x) { return std::sin(3 * x) + std::cos(5 * x); });
  const Field d3 = derivative(f, 3);
  for (std::size_t j = 0; j < g.n_points; ++j) {
    const double x = g.x(j);
    EXPECT_NEAR(d3(0, j), -27 * std::cos(3 * x) + 125 * std::sin(5 * x), 5e-11);
  }
}

TEST(Spectral, GaussianSobolevNorms) {
  const Field f = test_gaussian(512);
  EXPECT_NEAR(l2_norm(f), kGaussH0, 1e-14);
  EXPECT_NEAR(sobolev_norm(f, 0), kGaussH0, 1e-13);
  EXPECT_NEAR(sobolev_norm(f, 1), kGaussH1, 1e-13);
  EXPECT_NEAR(sobolev_norm(f, 2), kGaussH2, 1e-13);
  EXPECT_NEAR(sobolev_norm(f, 4), kGaussH4, 1e-12);
  EXPECT_NEAR(sobolev_norm(f, 8), kGaussH8, 1e-10);
}

TEST(Spectral, WeightedNormMatchesQuadrature) {
  // The tail of <x> g dropped by the 1e-14 coefficient floor carries about
  // 2e-8 of the H^11 term; without the floor the n = 1024 value is within 2e-9.
  for (std::size_t n : {1024u, 4096u}) EXPECT_NEAR(h_s2_norm(test_gaussian(n), 8) / kGaussH82, 1.0, 3e-8) << n;
}

TEST(Spectral, WeightedNormTerms) {
  const NormReport r = weighted_sobolev_norm(test_gaussian(512), 2, 0);
  ASSERT_EQ(r.terms.size(), 1u);
  EXPECT_NEAR(r.value, kGaussH2, 1e-13);
  EXPECT_FALSE(r.boundary_warning);
}

TEST(Spectral, DifferenceNormIgnoresRoundoff) {
  const Field f = test_gaussian(512);
  Field g = f;
  g(0, 7) += 1e-18;
  EXPECT_EQ(difference_norm(f, g, 14), 0.0);
}

TEST(Spectral, DealiasKeepsLowModes) {
  const GridSpec g{std::numbers::pi, 32, 1};
  const Field lo = Field::from_function(g, [](std::size_t, double x) { return std::cos(4 * x); });
  const Field hi = Field::from_function(g, [](std::size_t, double x) { return std::cos(14 * x); });
  EXPECT_NEAR(l2_norm(dealias(lo) - lo), 0.0, 1e-14);
  EXPECT_NEAR(l2_norm(dealias(hi)), 0.0, 1e-14);
}

TEST(Spectral, BoundaryMass) {
  EXPECT_LT(boundary_mass_fraction(test_gaussian(512)), 1e-100);
  const Field edge = gaussian(GridSpec{40.0, 512, 1}, 1.0, 1.0, 38.0);
  EXPECT_GT(boundary_mass_fraction(edge), 0.5);
}
