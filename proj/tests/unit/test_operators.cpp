#include <cmath>
#include <numbers>
#include <variant>

#include <gtest/gtest.h>

#include "aaoreg/operators.hpp"
#include "oracles.hpp"

using namespace aaoreg;
using aaoreg::oracle::Rng;

namespace {

constexpr double pi = std::numbers::pi;

ReducedEval eval_ok(const ProblemInstance& p, const GridFunction& x) {
  auto r = reduced_eval(p, x);
  EXPECT_TRUE(std::holds_alternative<ReducedEval>(r));
  return std::get<ReducedEval>(std::move(r));
}

}  // namespace

TEST(AaoPoint, StackRoundTripAndJointInner) {
  Rng rng(1);
  const Grid1D g(9);
  const AaoPoint a{rng.field(g), rng.field(g)};
  const AaoPoint b{rng.field(g), rng.field(g)};
  const AaoPoint back = AaoPoint::unstack(g, a.stacked());
  EXPECT_EQ(back.x.values(), a.x.values());
  EXPECT_EQ(back.u.values(), a.u.values());
  EXPECT_NEAR(inner(a, b), inner(a.x, b.x) + inner(a.u, b.u), 1e-14);
  EXPECT_NEAR(norm(a - a), 0.0, 0.0);
  EXPECT_NEAR(norm(2.0 * a), 2.0 * norm(a), 1e-13);
}

TEST(AaoApply, Examples) {
  const Grid1D g(99);
  const auto p0 = ProblemInstance::model(g, 0.0);
  const AaoImage zero = aao_apply(p0, AaoPoint::zeros(g));
  EXPECT_EQ(max_abs(zero.model), 0.0);
  EXPECT_EQ(max_abs(zero.obs), 0.0);

  const auto q = GridFunction::sample(g, [](double s) { return s * (1 - s); });
  const AaoImage img = aao_apply(p0, AaoPoint{GridFunction::constant(g, 2.0), q});
  EXPECT_LT(max_abs(img.model), 1e-9);
  EXPECT_EQ(img.obs.values(), q.values());
}

TEST(AaoJacobian, Examples) {
  Rng rng(2);
  const Grid1D g(30);
  const auto p = ProblemInstance::model(g, 4.0);
  const AaoPoint z{rng.field(g), rng.field(g)};
  const AaoImage zero = aao_jacobian_apply(p, z, AaoPoint::zeros(g));
  EXPECT_EQ(max_abs(zero.model) + max_abs(zero.obs), 0.0);

  const GridFunction dx = rng.field(g);
  const AaoImage only_x = aao_jacobian_apply(p, z, AaoPoint{dx, GridFunction(g)});
  EXPECT_LT(max_abs(only_x.model + dx), 1e-14);
  EXPECT_EQ(max_abs(only_x.obs), 0.0);

  const GridFunction w1 = rng.field(g);
  const AaoPoint adj = aao_jacobian_adjoint_apply(p, AaoPoint{z.x, GridFunction(g)}, AaoImage{w1, GridFunction(g)});
  EXPECT_LT(max_abs(adj.x + w1), 1e-14);
  EXPECT_LT(oracle::max_rel(adj.u.values(), laplacian_apply(g, w1).values()), 1e-13);
}

TEST(AaoJacobian, FiniteDifferences) {
  Rng rng(3);
  const Grid1D g(99);
  const double eps = 1e-7;
  for (int t = 0; t < 20; ++t) {
    const auto p = ProblemInstance::model(g, rng.uniform(-50.0, 50.0));
    const AaoPoint z{rng.field(g), rng.field(g, 0.5)};
    const AaoPoint d{rng.field(g), rng.field(g)};
    const AaoImage f0 = aao_apply(p, z);
    const AaoImage f1 = aao_apply(p, z + eps * d);
    const AaoImage lin = aao_jacobian_apply(p, z, d);
    const AaoImage fd{(1.0 / eps) * (f1.model - f0.model), (1.0 / eps) * (f1.obs - f0.obs)};
    EXPECT_LT(norm(AaoImage{fd.model - lin.model, fd.obs - lin.obs}) / norm(lin), 1e-6);
  }
}

TEST(AaoJacobian, AdjointIdentityOnRandomPairs) {
  Rng rng(4);
  const Grid1D g(99);
  for (int t = 0; t < 100; ++t) {
    const auto p = ProblemInstance::model(g, rng.uniform(-100.0, 100.0));
    const AaoPoint z{rng.field(g), rng.field(g)};
    const AaoPoint d{rng.field(g), rng.field(g)};
    const AaoImage w{rng.field(g), rng.field(g)};
    const double lhs = inner(aao_jacobian_apply(p, z, d), w);
    const double rhs = inner(d, aao_jacobian_adjoint_apply(p, z, w));
    EXPECT_LE(std::abs(lhs - rhs), 1e-10 * norm(d) * norm(w));
  }
}

TEST(ReducedEval, Examples) {
  const Grid1D g(99);
  const auto p0 = ProblemInstance::model(g, 0.0);
  EXPECT_EQ(max_abs(eval_ok(p0, GridFunction(g)).u), 0.0);

  const auto x = GridFunction::sample(g, [](double s) { return pi * pi * std::sin(pi * s); });
  const auto sine = GridFunction::sample(g, [](double s) { return std::sin(pi * s); });
  EXPECT_LT(max_abs(eval_ok(p0, x).u - sine), 1e-4);

  const auto b = GridFunction::sample(g, [](double s) { return 15.0 * (std::sin(pi * s) + 0.1 * s); });
  EXPECT_TRUE(std::holds_alternative<NonconvergenceReport>(reduced_eval(ProblemInstance::model(g, -1.0), b)));
}

TEST(ReducedEval, ViewConsistencyWithJointMap) {
  Rng rng(5);
  const Grid1D g(99);
  const auto p = ProblemInstance::model(g, 10.0);
  const GridFunction x = rng.field(g, 10.0);
  const ReducedEval e = eval_ok(p, x);
  const AaoImage img = aao_apply(p, AaoPoint{x, e.u});
  EXPECT_LE(norm(img.model), 1e-10);
  EXPECT_EQ(img.obs.values(), e.value().values());
}

TEST(ReducedDerivative, LinearCaseIsDenseInverse) {
  Rng rng(6);
  const Grid1D g(20);
  const auto p = ProblemInstance::model(g, 0.0);
  const ReducedEval e = eval_ok(p, rng.field(g));
  const Eigen::MatrixXd inv = oracle::dense_neg_laplacian(20).inverse();
  for (int col = 0; col < 20; ++col) {
    GridFunction unit(g);
    unit[static_cast<std::size_t>(col)] = 1.0;
    EXPECT_LT(oracle::max_rel(reduced_derivative_apply(e, unit).values(), inv.col(col)), 1e-10);
  }
  EXPECT_EQ(max_abs(reduced_derivative_apply(e, GridFunction(g))), 0.0);
  EXPECT_EQ(max_abs(reduced_adjoint_apply(e, GridFunction(g))), 0.0);
}

TEST(ReducedDerivative, FiniteDifferencesAndAdjoint) {
  Rng rng(7);
  const Grid1D g(99);
  const auto p = ProblemInstance::model(g, 10.0);
  const double eps = 1e-7;
  const StateSolveOptions tight{1e-13, 100};
  for (int t = 0; t < 5; ++t) {
    const GridFunction x = rng.field(g, 10.0);
    const GridFunction dx = rng.field(g, 10.0);
    const ReducedEval e = std::get<ReducedEval>(reduced_eval(p, x, tight));
    const ReducedEval e1 = std::get<ReducedEval>(reduced_eval(p, x + eps * dx, tight));
    const GridFunction lin = reduced_derivative_apply(e, dx);
    EXPECT_LT(norm((1.0 / eps) * (e1.u - e.u) - lin) / norm(lin), 1e-5);
    EXPECT_EQ(lin.values(), reduced_adjoint_apply(e, dx).values());
  }
  const ReducedEval e = eval_ok(p, rng.field(g, 5.0));
  for (int t = 0; t < 100; ++t) {
    const GridFunction dx = rng.field(g), r = rng.field(g);
    const double lhs = inner(reduced_derivative_apply(e, dx), r);
    EXPECT_LE(std::abs(lhs - inner(dx, reduced_adjoint_apply(e, r))), 1e-10 * norm(dx) * norm(r));
  }
}

TEST(OperatorNorm, Examples) {
  const LinearMap id = [](const Eigen::VectorXd& v) { return v; };
  EXPECT_NEAR(operator_norm_estimate(id, id, 10, 5), 1.0, 1e-12);

  const LinearMap diag = [](const Eigen::VectorXd& v) { return Eigen::VectorXd(Eigen::Vector3d(1, 2, 3).cwiseProduct(v)); };
  EXPECT_NEAR(operator_norm_estimate(diag, diag, 3, 200), 3.0, 1e-6);

  const Grid1D g(99);
  const SymTridiagonal lap = dirichlet_laplacian(g);
  const LinearMap apply = [&](const Eigen::VectorXd& v) { return lap.apply(v); };
  const double top = (2.0 - 2.0 * std::cos(99 * pi * g.h())) / (g.h() * g.h());
  EXPECT_NEAR(operator_norm_estimate(apply, apply, 99, 200), top, 0.01 * top);
}

TEST(OperatorNorm, DeterministicGivenSeed) {
  const Eigen::MatrixXd m = oracle::Rng(8).vector(36).reshaped(6, 6);
  const LinearMap a = [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(m * v); };
  const LinearMap at = [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(m.transpose() * v); };
  EXPECT_EQ(operator_norm_estimate(a, at, 6, 30, 5), operator_norm_estimate(a, at, 6, 30, 5));
  const double exact = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()[0];
  EXPECT_NEAR(operator_norm_estimate(a, at, 6, 500), exact, 1e-6 * exact);
}

TEST(StateRiesz, GramAndRieszAreInverse) {
  Rng rng(9);
  const Grid1D g(25);
  for (StateNorm kind : {StateNorm::l2, StateNorm::h2}) {
    const StateRiesz r(g, kind);
    const GridFunction v = rng.field(g);
    EXPECT_LT(norm(r.riesz_apply(r.gram_apply(v)) - v) / norm(v), 1e-10);
    const Eigen::VectorXd ref = oracle::dense_state_gram(25, kind) * v.values();
    EXPECT_LT(oracle::max_rel(r.gram_apply(v).values(), ref), 1e-10);
    const GridFunction w = rng.field(g);
    EXPECT_NEAR(r.inner(v, w), inner(v, r.gram_apply(w)), 1e-9 * std::abs(r.inner(v, v)));
  }
}
