#include <cmath>

#include <gtest/gtest.h>

#include "qkdv/error.hpp"
#include "qkdv/linear.hpp"
#include "qkdv/problems.hpp"
#include "qkdv/spectral.hpp"

using namespace qkdv;

namespace {

// u(x, 1) for u_t + u_xxx = -eps u_xxxx, u0 = exp(-x^2/4), from
// (sqrt 2 / sqrt(2 pi)) int exp(-k^2 - eps k^4) cos(x k + k^3) dk,
// evaluated with mpmath and cross-checked with scipy.
struct Sample {
  std::size_t j;  // grid index on L = 40, n = 512; x = -40 + j / 6.4
  double eps0, eps1;
};
constexpr Sample kAiry[] = {
    {256, 0.78315622506031431, 0.78363211064209238},
    {264, 0.4832798967104203, 0.49238209869254937},
    {240, 0.53323423115228226, 0.51393125079292483},
    {280, 0.082296384414823814, 0.082351001345556365},
};

// Heat part alone, eps t = 0.1, at x = 0 and x = 1.25.
constexpr double kHeat0 = 0.94450180167417135;
constexpr double kHeat8 = 0.68299362938424925;

}  // namespace

TEST(Linear, AiryMatchesQuadrature) {
  const Problem p = make_problem("airy");
  for (double eps : {0.0, 0.1}) {
    SolveConfig c;
    c.eps = eps;
    c.t_final = 1.0;
    c.samples = 2;
    const Trajectory tr = solve_linear(p.coeffs, p.initial(p.grid), nullptr, c);
    for (const Sample& s : kAiry) EXPECT_NEAR(tr.final_state()(0, s.j), eps == 0.0 ? s.eps0 : s.eps1, 1e-10);
  }
}

TEST(Linear, ImexAgreesWithIntegratingFactor) {
  const Problem p = make_problem("varcoef");
  SolveConfig c;
  c.eps = 0.01;
  c.t_final = 0.05;
  c.samples = 2;
  const Field u0 = p.initial(p.grid);
  const Trajectory a = solve_linear(p.coeffs, u0, nullptr, c);
  c.integrator = Integrator::imex;
  const Trajectory b = solve_linear(p.coeffs, u0, nullptr, c);
  EXPECT_LT(l2_norm(a.final_state() - b.final_state()) / l2_norm(a.final_state()), 1e-6);
}

TEST(Linear, ViscousSemigroup) {
  const Field u0 = gaussian(GridSpec{40.0, 512, 1}, 1.0, std::sqrt(2.0));
  const Field u = viscous_semigroup(u0, 0.1, 1.0);
  EXPECT_NEAR(u(0, 256), kHeat0, 1e-13);
  EXPECT_NEAR(u(0, 264), kHeat8, 1e-13);
  EXPECT_THROW(viscous_semigroup(u0, 0.1, -1.0), TimeDirectionError);
}

TEST(Linear, AiryConservesL2) {
  const Problem p = make_problem("airy");
  SolveConfig c;
  c.t_final = 0.5;
  c.samples = 6;
  const Trajectory tr = solve_linear(p.coeffs, p.initial(p.grid), nullptr, c);
  for (const Field& u : tr.states) EXPECT_NEAR(l2_norm(u), l2_norm(tr.states.front()), 1e-12);
  EXPECT_EQ(tr.times.size(), 6u);
  EXPECT_DOUBLE_EQ(tr.times.back(), 0.5);
}

TEST(Linear, ZeroDataStaysZero) {
  const Problem p = make_problem("system2");
  SolveConfig c;
  c.t_final = 0.1;
  c.samples = 3;
  const Trajectory tr = solve_linear(p.coeffs, Field(p.grid), nullptr, c);
  EXPECT_EQ(tr.final_state().max_abs(), 0.0);
}

TEST(Linear, L2BoundOnVarcoef) {
  const Problem p = make_problem("varcoef");
  const AssumptionConstants k = compute_constants(p.coeffs, p.grid, 1.0, 0.0);
  SolveConfig c;
  c.eps = 0.1;
  c.t_final = std::min(0.2, k.T);
  c.samples = 11;
  const Field u0 = p.initial(p.grid);
  const L2BoundReport r = verify_l2_bound(solve_linear(p.coeffs, u0, nullptr, c), u0, k);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.sup_ratio, 1.0);
}

TEST(Linear, HeatConstantsFrozen) {
  EXPECT_DOUBLE_EQ(heat_constant(4), 1.0);
  EXPECT_DOUBLE_EQ(heat_constant(8), 1.3086277387510514);
  EXPECT_DOUBLE_EQ(calibrate_heat_constant(8), heat_constant(8));
  EXPECT_THROW(heat_constant(5), DomainError);
}

TEST(Linear, HeatSemigroupContracts) {
  const GridSpec g{40.0, 512, 1};
  const Field u0 = gaussian(g, 1.0, std::sqrt(2.0));
  const HeatReport r = heat_smoothing_check(u0, gaussian(g, 0.5, 1.0, 0.5), 1.0, 1.0, 8, heat_constant(8));
  EXPECT_LE(r.ratio_a, 1.0 + 1e-12);
  EXPECT_TRUE(r.pass_a);
  EXPECT_EQ(heat_smoothing_check(Field(g), u0, 1.0, 1.0, 8, 1.0).ratio_a, 0.0);
}

TEST(Linear, HeatFactorScaling) {
  const GridSpec g{40.0, 256, 1};
  const Field f = gaussian(g, 1.0, 1.0);
  for (double T : {0.5, 1.0, 2.0})
    EXPECT_DOUBLE_EQ(heat_smoothing_check(f, f, 0.1, T, 4, 1.0, 3).factor_b, T + std::pow(T / 1e-3, 0.25));
  EXPECT_THROW(heat_smoothing_check(f, f, 0.0, 1.0, 4, 1.0), DomainError);
}
