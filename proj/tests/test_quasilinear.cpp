#include <cmath>

#include <gtest/gtest.h>

#include "qkdv/error.hpp"
#include "qkdv/linear.hpp"
#include "qkdv/problems.hpp"
#include "qkdv/quasilinear.hpp"
#include "qkdv/spectral.hpp"

using namespace qkdv;

namespace {

Problem small_quasilinear() { return make_problem("quasilinear", {{"amp", 1e-6}}); }

}  // namespace

// For a = 1 + u^2 the operator is (1 + u^2) u'''.
TEST(Quasilinear, ApplyN) {
  const Problem p = make_problem("quasilinear", {{"amp", 0.3}});
  const Field u = p.initial(p.grid);
  const Field n = apply_N(p.coeffs, u, 0.0);
  const Field u3 = derivative(u, 3);
  for (std::size_t j = 0; j < u.points(); j += 13)
    EXPECT_NEAR(n(0, j), (1.0 + u(0, j) * u(0, j)) * u3(0, j), 1e-10);
}

TEST(Quasilinear, SmallDataTracksAiry) {
  const Problem q = small_quasilinear();
  const Field u0 = q.initial(q.grid);
  SolveConfig c;
  c.eps = 0.01;
  c.t_final = 0.05;
  c.samples = 2;
  const Trajectory a = solve_quasilinear(q.coeffs, u0, nullptr, c);
  const Trajectory b = solve_linear(make_problem("airy").coeffs, u0, nullptr, c);
  // The nonlinearity is cubic in the 1e-6 amplitude.
  EXPECT_LT(l2_norm(a.final_state() - b.final_state()) / l2_norm(b.final_state()), 1e-10);
}

TEST(Quasilinear, DataNorm) {
  const Problem q = small_quasilinear();
  const Field u0 = q.initial(q.grid);
  EXPECT_DOUBLE_EQ(data_norm_y(u0, {}, {}), h_s2_norm(u0, 8));
}

TEST(Quasilinear, PicardContracts) {
  const Problem q = small_quasilinear();
  const Field u0 = q.initial(q.grid);
  PicardConfig pc;
  pc.eps = 0.1;
  const PicardResult r = picard_solve(q.coeffs, u0, {}, pc);
  EXPECT_TRUE(r.state.converged);
  EXPECT_LE(r.state.iterations, 40u);
  for (double x : r.state.ratios) EXPECT_LT(x, 0.5);
  EXPECT_NEAR(r.state.window, practical_window(q.coeffs, u0), 1e-15);
}

TEST(Quasilinear, PicardZeroDataIsFixed) {
  const Problem q = small_quasilinear();
  PicardConfig pc;
  const PicardResult r = picard_solve(q.coeffs, Field(q.grid), {}, pc);
  EXPECT_TRUE(r.state.converged);
  EXPECT_EQ(r.trajectory.final_state().max_abs(), 0.0);
}

TEST(Quasilinear, DataBoundEnforced) {
  const Problem q = make_problem("quasilinear", {{"amp", 1.0}});
  PicardConfig pc;
  pc.data_bound = 1.0;
  EXPECT_THROW(picard_solve(q.coeffs, q.initial(q.grid), {}, pc), AssumptionError);
}

TEST(Quasilinear, ContinuationStaysBelowBound) {
  const Problem q = small_quasilinear();
  const Field u0 = q.initial(q.grid);
  const AssumptionConstants k = compute_constants(q.coeffs, q.grid, 1.0, 0.0);
  PicardConfig pc;
  pc.eps = 0.1;
  const ContinuationReport cr = continuation_solve(q.coeffs, u0, {}, 5e-4, k, pc);
  EXPECT_TRUE(cr.bound_held);
  EXPECT_TRUE(cr.all_converged);
  EXPECT_NEAR(cr.trajectory.times.back(), 5e-4, 1e-15);
  EXPECT_LT(cr.max_norm, cr.bound);
}

TEST(Quasilinear, DifferentiatedSystemReassembles) {
  const Problem q = make_problem("quasilinear", {{"amp", 0.2}});
  const Field u = q.initial(q.grid);
  for (int s : {1, 3, 8}) {
    const DifferentiatedSystem d = differentiate_system(q.coeffs, u, 0.0, s, false);
    EXPECT_LT(d.decomposition_residual, 1e-8) << s;
  }
}

TEST(Quasilinear, MoserRatiosFinite) {
  const Problem q = make_problem("quasilinear", {{"amp", 0.1}});
  const Field u = q.initial(q.grid);
  const Field v = gaussian(q.grid, 0.08, 3.0, 0.5);
  const MoserReport m = moser_check(q.coeffs, u, v, 1.0, 8);
  EXPECT_TRUE(std::isfinite(m.ratio_a));
  EXPECT_TRUE(std::isfinite(m.ratio_b));
  EXPECT_GT(m.ratio_a, 0.0);
  EXPECT_THROW(moser_check(q.coeffs, u, v, 1.0, 7), Error);
}
