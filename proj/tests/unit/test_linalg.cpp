#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "aaoreg/linalg.hpp"
#include "oracles.hpp"

using namespace aaoreg;
using aaoreg::oracle::Rng;

namespace {

SymTridiagonal random_spd_tridiagonal(Rng& rng, Eigen::Index n) {
  SymTridiagonal t{Eigen::VectorXd(n), Eigen::VectorXd(n - 1)};
  for (Eigen::Index i = 0; i < n - 1; ++i) t.off[i] = rng.uniform(-1.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) t.diag[i] = 2.5 + rng.uniform(0.0, 1.0);
  return t;
}

Eigen::MatrixXd dense(const SymPentadiagonal& p) {
  const Eigen::Index n = p.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = p.d0[i];
    if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = p.d1[i];
    if (i + 2 < n) m(i, i + 2) = m(i + 2, i) = p.d2[i];
  }
  return m;
}

}  // namespace

TEST(Tridiagonal, ApplyMatchesDense) {
  Rng rng(1);
  const SymTridiagonal t = random_spd_tridiagonal(rng, 17);
  const Eigen::VectorXd v = rng.vector(17);
  EXPECT_LT((t.apply(v) - t.dense() * v).norm(), 1e-13);
}

TEST(Tridiagonal, FactorSolvesRandomSystems) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const SymTridiagonal t = random_spd_tridiagonal(rng, 30);
    const Eigen::VectorXd b = rng.vector(30);
    const Eigen::VectorXd x = TridiagonalFactor(t).solve(b);
    const Eigen::VectorXd ref = t.dense().fullPivLu().solve(b);
    EXPECT_LT((x - ref).norm() / ref.norm(), 1e-12);
  }
}

TEST(Tridiagonal, IndefiniteButRegularStillSolves) {
  const Eigen::Index n = 5;
  const SymTridiagonal t{Eigen::VectorXd::Constant(n, -3.0), Eigen::VectorXd::Constant(n - 1, 1.0)};
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(n, 1.0, 5.0);
  EXPECT_LT((t.dense() * TridiagonalFactor(t).solve(b) - b).norm(), 1e-12);
}

TEST(Tridiagonal, SingularPivotIsReported) {
  // [[1,1],[1,1]] has a zero second pivot.
  const SymTridiagonal t{Eigen::Vector2d(1.0, 1.0), Eigen::VectorXd::Constant(1, 1.0)};
  EXPECT_THROW(TridiagonalFactor{t}, SingularOperator);
}

TEST(Tridiagonal, SolveCounterIncrements) {
  Rng rng(3);
  const TridiagonalFactor f(random_spd_tridiagonal(rng, 8));
  reset_solve_stats();
  f.solve(rng.vector(8));
  f.solve(rng.vector(8));
  EXPECT_EQ(solve_stats().linear_solves, 2u);
}

TEST(Pentadiagonal, SquareMatchesDenseProduct) {
  Rng rng(4);
  const SymTridiagonal t = random_spd_tridiagonal(rng, 12);
  const Eigen::MatrixXd ref = t.dense() * t.dense();
  EXPECT_LT((dense(square(t)) - ref).norm(), 1e-12 * ref.norm());
  const SymPentadiagonal q = scaled_plus_identity(square(t), 2.0, 3.0);
  EXPECT_LT((dense(q) - (2.0 * ref + 3.0 * Eigen::MatrixXd::Identity(12, 12))).norm(), 1e-12 * ref.norm());
}

TEST(Pentadiagonal, CholeskySolvesSpdSystems) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const SymPentadiagonal p = scaled_plus_identity(square(random_spd_tridiagonal(rng, 25)), 1.0, 0.5);
    const Eigen::VectorXd b = rng.vector(25);
    const Eigen::VectorXd x = PentadiagonalCholesky(p).solve(b);
    EXPECT_LT((dense(p) * x - b).norm() / b.norm(), 1e-12);
    EXPECT_LT((p.apply(x) - b).norm() / b.norm(), 1e-12);
  }
}

TEST(Pentadiagonal, RejectsIndefinite) {
  const SymPentadiagonal p{Eigen::VectorXd::Constant(4, -1.0), Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(2)};
  EXPECT_THROW(PentadiagonalCholesky{p}, SingularOperator);
}

TEST(Spectrum, MatchesDenseEigendecomposition) {
  const std::size_t n = 20;
  const DirichletSpectrum spec(n);
  const Eigen::MatrixXd l = oracle::dense_neg_laplacian(n);
  const Eigen::MatrixXd q = spec.basis();
  const Eigen::MatrixXd rebuilt = q * spec.eigenvalues().asDiagonal() * q;
  EXPECT_LT((rebuilt - l).norm() / l.norm(), 1e-12);
  EXPECT_LT((q * q - Eigen::MatrixXd::Identity(20, 20)).norm(), 1e-12);

  const double h = 1.0 / 21.0;
  const double top = (2.0 - 2.0 * std::cos(20 * std::numbers::pi * h)) / (h * h);
  EXPECT_NEAR(spec.eigenvalues().maxCoeff(), top, 1e-9 * top);
}

TEST(Spectrum, ApplyDiagonalInvertsWithoutSolves) {
  const std::size_t n = 15;
  const DirichletSpectrum spec(n);
  Rng rng(6);
  const Eigen::VectorXd v = rng.vector(15);
  reset_solve_stats();
  const Eigen::VectorXd w = spec.apply_diagonal(spec.eigenvalues().cwiseInverse(), v);
  EXPECT_EQ(solve_stats().linear_solves, 0u);
  EXPECT_LT((oracle::dense_neg_laplacian(n) * w - v).norm() / v.norm(), 1e-12);
}

TEST(ConjugateGradient, ConvergesOnSpdSystem) {
  Rng rng(7);
  const Eigen::MatrixXd a = oracle::dense_neg_laplacian(40) + Eigen::MatrixXd::Identity(40, 40);
  const Eigen::VectorXd b = rng.vector(40);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(40);
  const CgReport rep = conjugate_gradient([&](const Eigen::VectorXd& v) { return Eigen::VectorXd(a * v); }, b, x,
                                          1e-12, 200);
  EXPECT_TRUE(rep.converged);
  EXPECT_LT((a * x - b).norm() / b.norm(), 1e-11);
}

TEST(ConjugateGradient, ZeroRightSide) {
  Eigen::VectorXd x = Eigen::VectorXd::Ones(3);
  const CgReport rep = conjugate_gradient([](const Eigen::VectorXd& v) { return v; }, Eigen::VectorXd::Zero(3), x,
                                          1e-10, 10);
  EXPECT_TRUE(rep.converged);
  EXPECT_EQ(x.norm(), 0.0);
}
