#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace aaoreg {

/// A factorization met a pivot too small to continue; for A_u this means the
/// linearized model lost bounded invertibility.
class SingularOperator : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-thread counters of linear-system and nonlinear-state solves. Tests
/// reset them around a region and read them afterwards.
struct SolveStats {
  std::size_t linear_solves = 0;
  std::size_t state_solves = 0;
};

SolveStats& solve_stats() noexcept;
void reset_solve_stats() noexcept;

/// Symmetric tridiagonal matrix: main diagonal of length n, off-diagonal n-1.
struct SymTridiagonal {
  Eigen::VectorXd diag;
  Eigen::VectorXd off;

  Eigen::Index size() const noexcept { return diag.size(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd dense() const;
};

/// Symmetric pentadiagonal matrix stored by its three upper bands.
struct SymPentadiagonal {
  Eigen::VectorXd d0;
  Eigen::VectorXd d1;
  Eigen::VectorXd d2;

  Eigen::Index size() const noexcept { return d0.size(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
};

/// T*T for symmetric tridiagonal T.
SymPentadiagonal square(const SymTridiagonal& t);

/// c1 * P + c0 * I, in place on a copy.
SymPentadiagonal scaled_plus_identity(SymPentadiagonal p, double c1, double c0);

/// LDL^T of a symmetric tridiagonal matrix without pivoting. Throws
/// SingularOperator when a pivot falls below 1e-14 times the matrix scale.
class TridiagonalFactor {
 public:
  explicit TridiagonalFactor(const SymTridiagonal& t);

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::Index size() const noexcept { return pivots_.size(); }

 private:
  Eigen::VectorXd pivots_;
  Eigen::VectorXd lower_;
};

/// Banded Cholesky (bandwidth 2) of an SPD pentadiagonal matrix.
class PentadiagonalCholesky {
 public:
  explicit PentadiagonalCholesky(const SymPentadiagonal& p);

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

 private:
  // Row i holds L(i,i-2), L(i,i-1), L(i,i).
  Eigen::MatrixX3d l_;
};

/// Eigen-decomposition of the Dirichlet second-difference operator -Δ_h on
/// n interior nodes: -Δ_h = Q diag(λ) Q with the symmetric orthogonal sine
/// basis Q. Functions of -Δ_h are applied as matrix products, without solves.
class DirichletSpectrum {
 public:
  explicit DirichletSpectrum(std::size_t n_interior);

  const Eigen::VectorXd& eigenvalues() const noexcept { return lambda_; }
  const Eigen::MatrixXd& basis() const noexcept { return q_; }

  /// Q diag(weights) Q v.
  Eigen::VectorXd apply_diagonal(const Eigen::VectorXd& weights, const Eigen::VectorXd& v) const;

 private:
  Eigen::MatrixXd q_;
  Eigen::VectorXd lambda_;
};

struct CgReport {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Unpreconditioned conjugate gradients for a symmetric positive definite
/// operator in the Euclidean inner product; x holds the initial guess.
template <class Apply>
CgReport conjugate_gradient(Apply&& apply, const Eigen::VectorXd& rhs, Eigen::VectorXd& x, double rel_tol,
                            std::size_t max_iter) {
  CgReport report;
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    x.setZero();
    report.converged = true;
    return report;
  }
  Eigen::VectorXd r = rhs - apply(x);
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  for (; report.iterations < max_iter; ++report.iterations) {
    if (std::sqrt(rr) <= rel_tol * rhs_norm) break;
    const Eigen::VectorXd ap = apply(p);
    const double curvature = p.dot(ap);
    if (!(curvature > 0.0)) throw SingularOperator("conjugate_gradient: operator is not positive definite");
    const double step = rr / curvature;
    x += step * p;
    r -= step * ap;
    const double rr_next = r.squaredNorm();
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  report.relative_residual = std::sqrt(rr) / rhs_norm;
  report.converged = report.relative_residual <= rel_tol;
  return report;
}

}  // namespace aaoreg
