#include <cmath>
#include <numbers>
#include <variant>

#include <gtest/gtest.h>

#include "aaoreg/diagnostics.hpp"
#include "aaoreg/harness.hpp"
#include "aaoreg/pde.hpp"
#include "oracles.hpp"

using namespace aaoreg;
using aaoreg::oracle::Rng;

namespace {

constexpr double pi = std::numbers::pi;

double state_error(std::size_t cells, double xi) {
  const Grid1D g = Grid1D::with_cells(cells);
  const auto u_exact = GridFunction::sample(g, [](double s) { return std::sin(pi * s); });
  const auto b = GridFunction::sample(g, [xi](double s) {
    const double u = std::sin(pi * s);
    return pi * pi * u + xi * u * u * u;
  });
  const auto res = solve_state(ProblemInstance::model(g, xi), b, GridFunction(g), 1e-12, 100);
  return max_abs(std::get<StateSolution>(res).u - u_exact);
}

}  // namespace

TEST(Laplacian, MatchesDenseStencil) {
  const Grid1D g(20);
  EXPECT_LT((dirichlet_laplacian(g).dense() - oracle::dense_neg_laplacian(20)).norm(), 1e-9);
  Rng rng(1);
  const GridFunction f = rng.field(g);
  const Eigen::VectorXd ref = oracle::dense_neg_laplacian(20) * f.values();
  EXPECT_LT(oracle::max_rel(laplacian_apply(g, f).values(), ref), 1e-13);
}

TEST(Residual, ExactOnQuadraticsWhenLinear) {
  const Grid1D g(99);
  const auto p = ProblemInstance::model(g, 0.0);
  const auto u = GridFunction::sample(g, [](double s) { return s * (1 - s); });
  EXPECT_LT(max_abs(residual_A(p, GridFunction::constant(g, 2.0), u)), 1e-9);
}

TEST(Residual, MatchesDenseFormula) {
  Rng rng(2);
  const Grid1D g(30);
  for (double xi : {-10.0, 0.0, 3.0, 1000.0}) {
    const auto p = ProblemInstance::model(g, xi);
    const GridFunction x = rng.field(g), u = rng.field(g);
    const Eigen::VectorXd ref = oracle::dense_residual(xi, x.values(), u.values());
    EXPECT_LT(oracle::max_rel(residual_A(p, x, u).values(), ref), 1e-12);
  }
}

TEST(Jacobian, FiniteDifferenceConsistency) {
  Rng rng(3);
  const Grid1D g(99);
  const double eps = 1e-7;
  for (int t = 0; t < 20; ++t) {
    const auto p = ProblemInstance::model(g, rng.uniform(-20.0, 20.0));
    const GridFunction x = rng.field(g), u = rng.field(g, 0.5), v = rng.field(g);
    const PdeJacobian j = jacobian_at(p, x, u);
    const GridFunction fd_u = (1.0 / eps) * (residual_A(p, x, u + eps * v) - residual_A(p, x, u));
    // Affine in x, so a large step is exact and avoids cancellation.
    const GridFunction fd_x = 0.5 * (residual_A(p, x + 2.0 * v, u) - residual_A(p, x, u));
    EXPECT_LT(norm(fd_u - j.apply_k(v)) / norm(j.apply_k(v)), 1e-6);
    EXPECT_LT(norm(fd_x - j.apply_l(v)) / norm(v), 1e-6);
  }
}

TEST(Jacobian, SymmetricAndMatchesDense) {
  Rng rng(4);
  const Grid1D g(40);
  const auto p = ProblemInstance::model(g, 7.0);
  const GridFunction u = rng.field(g);
  const PdeJacobian j = jacobian_at(p, GridFunction(g), u);
  EXPECT_LT((j.k().dense() - oracle::dense_model_jacobian(7.0, u.values())).norm(), 1e-9);
  for (int t = 0; t < 50; ++t) {
    const GridFunction a = rng.field(g), b = rng.field(g);
    const double lhs = inner(j.apply_k(a), b);
    EXPECT_NEAR(lhs, inner(a, j.apply_k(b)), 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(LinearizedSolves, AdjointEqualsForwardAndInvertsK) {
  Rng rng(5);
  const Grid1D g(50);
  const auto p = ProblemInstance::model(g, 2.0);
  const PdeJacobian j = jacobian_at(p, GridFunction(g), rng.field(g));
  const GridFunction r = rng.field(g);
  const GridFunction v = solve_linearized(j, r);
  EXPECT_EQ(v.values(), solve_adjoint(j, r).values());
  EXPECT_LT(norm(j.apply_k(v) - r) / norm(r), 1e-12);
  for (int t = 0; t < 20; ++t) {
    const GridFunction a = rng.field(g), b = rng.field(g);
    const double lhs = inner(solve_linearized(j, a), b);
    EXPECT_NEAR(lhs, inner(a, solve_adjoint(j, b)), 1e-10 * norm(solve_linearized(j, a)) * norm(b));
  }
}

TEST(StateSolve, ZeroSourceGivesZeroState) {
  const Grid1D g(99);
  const auto res = solve_state(ProblemInstance::model(g, 5.0), GridFunction(g), GridFunction(g), 1e-10, 50);
  ASSERT_TRUE(std::holds_alternative<StateSolution>(res));
  EXPECT_EQ(max_abs(std::get<StateSolution>(res).u), 0.0);
}

TEST(StateSolve, ConvergesToToleranceForPositiveXi) {
  const Grid1D g(99);
  const auto b = GridFunction::sample(g, [](double s) { return 15.0 * (std::sin(pi * s) + 0.1 * s); });
  for (double xi : {0.0, 10.0, 1000.0, -0.5}) {
    const auto p = ProblemInstance::model(g, xi);
    reset_solve_stats();
    const auto res = solve_state(p, b, GridFunction(g), 1e-10, 100);
    ASSERT_TRUE(std::holds_alternative<StateSolution>(res)) << "xi " << xi;
    const auto& sol = std::get<StateSolution>(res);
    EXPECT_LE(norm(residual_A(p, b, sol.u)), 1e-10);
    EXPECT_EQ(solve_stats().state_solves, 1u);
  }
}

TEST(StateSolve, FailureBelowFoldIsReported) {
  const Grid1D g(99);
  const auto b = GridFunction::sample(g, [](double s) { return 15.0 * (std::sin(pi * s) + 0.1 * s); });
  const auto res = solve_state(ProblemInstance::model(g, -1.0), b, GridFunction(g), 1e-10, 200);
  ASSERT_TRUE(std::holds_alternative<NonconvergenceReport>(res));
  const auto& rep = std::get<NonconvergenceReport>(res);
  EXPECT_GT(rep.residual_norm, 1e-10);
  EXPECT_FALSE(rep.reason.empty());
}

TEST(StateSolve, SecondOrderAccurate) {
  const std::vector<double> hs = {1.0 / 50, 1.0 / 100, 1.0 / 200};
  const std::vector<double> errs = {state_error(50, 0.0), state_error(100, 0.0), state_error(200, 0.0)};
  EXPECT_NEAR(log_log_slope(hs, errs), 2.0, 0.2);
  const std::vector<double> errs_nl = {state_error(50, 20.0), state_error(100, 20.0), state_error(200, 20.0)};
  EXPECT_NEAR(log_log_slope(hs, errs_nl), 2.0, 0.2);
}
