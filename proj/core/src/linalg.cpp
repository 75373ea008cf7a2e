#include "aaoreg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace aaoreg {

namespace {
thread_local SolveStats g_stats;
}  // namespace

SolveStats& solve_stats() noexcept { return g_stats; }
void reset_solve_stats() noexcept { g_stats = SolveStats{}; }

Eigen::VectorXd SymTridiagonal::apply(const Eigen::VectorXd& v) const {
  const Eigen::Index n = size();
  Eigen::VectorXd out = diag.cwiseProduct(v);
  if (n > 1) {
    out.head(n - 1) += off.cwiseProduct(v.tail(n - 1));
    out.tail(n - 1) += off.cwiseProduct(v.head(n - 1));
  }
  return out;
}

Eigen::MatrixXd SymTridiagonal::dense() const {
  const Eigen::Index n = size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  m.diagonal() = diag;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    m(i, i + 1) = off[i];
    m(i + 1, i) = off[i];
  }
  return m;
}

Eigen::VectorXd SymPentadiagonal::apply(const Eigen::VectorXd& v) const {
  const Eigen::Index n = size();
  Eigen::VectorXd out = d0.cwiseProduct(v);
  if (n > 1) {
    out.head(n - 1) += d1.cwiseProduct(v.tail(n - 1));
    out.tail(n - 1) += d1.cwiseProduct(v.head(n - 1));
  }
  if (n > 2) {
    out.head(n - 2) += d2.cwiseProduct(v.tail(n - 2));
    out.tail(n - 2) += d2.cwiseProduct(v.head(n - 2));
  }
  return out;
}

SymPentadiagonal square(const SymTridiagonal& t) {
  const Eigen::Index n = t.size();
  const auto& a = t.diag;
  const auto& b = t.off;
  SymPentadiagonal p{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(std::max<Eigen::Index>(n - 1, 0)),
                     Eigen::VectorXd::Zero(std::max<Eigen::Index>(n - 2, 0))};
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = a[i] * a[i];
    if (i > 0) s += b[i - 1] * b[i - 1];
    if (i + 1 < n) s += b[i] * b[i];
    p.d0[i] = s;
  }
  for (Eigen::Index i = 0; i + 1 < n; ++i) p.d1[i] = b[i] * (a[i] + a[i + 1]);
  for (Eigen::Index i = 0; i + 2 < n; ++i) p.d2[i] = b[i] * b[i + 1];
  return p;
}

SymPentadiagonal scaled_plus_identity(SymPentadiagonal p, double c1, double c0) {
  p.d0 = c1 * p.d0 + Eigen::VectorXd::Constant(p.d0.size(), c0);
  p.d1 *= c1;
  p.d2 *= c1;
  return p;
}

TridiagonalFactor::TridiagonalFactor(const SymTridiagonal& t) : pivots_(t.size()), lower_(t.size()) {
  const Eigen::Index n = t.size();
  double scale = t.diag.cwiseAbs().maxCoeff();
  if (n > 1) scale += 2.0 * t.off.cwiseAbs().maxCoeff();
  const double threshold = 1e-14 * std::max(scale, 1.0);

  lower_[0] = 0.0;
  pivots_[0] = t.diag[0];
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0) {
      lower_[i] = t.off[i - 1] / pivots_[i - 1];
      pivots_[i] = t.diag[i] - lower_[i] * t.off[i - 1];
    }
    if (!(std::abs(pivots_[i]) > threshold)) {
      throw SingularOperator("TridiagonalFactor: pivot " + std::to_string(pivots_[i]) + " at row " +
                             std::to_string(i));
    }
  }
}

Eigen::VectorXd TridiagonalFactor::solve(const Eigen::VectorXd& rhs) const {
  ++solve_stats().linear_solves;
  const Eigen::Index n = pivots_.size();
  Eigen::VectorXd x = rhs;
  for (Eigen::Index i = 1; i < n; ++i) x[i] -= lower_[i] * x[i - 1];
  for (Eigen::Index i = 0; i < n; ++i) x[i] /= pivots_[i];
  for (Eigen::Index i = n - 2; i >= 0; --i) x[i] -= lower_[i + 1] * x[i + 1];
  return x;
}

PentadiagonalCholesky::PentadiagonalCholesky(const SymPentadiagonal& p) : l_(p.size(), 3) {
  const Eigen::Index n = p.size();
  l_.setZero();
  auto a = [&](Eigen::Index i, Eigen::Index j) -> double {  // i >= j, i - j <= 2
    switch (i - j) {
      case 0: return p.d0[i];
      case 1: return p.d1[j];
      default: return p.d2[j];
    }
  };
  // L(i,j) lives in l_(i, j - i + 2).
  auto lij = [&](Eigen::Index i, Eigen::Index j) -> double& { return l_(i, j - i + 2); };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = std::max<Eigen::Index>(0, i - 2); j <= i; ++j) {
      double sum = a(i, j);
      for (Eigen::Index k = std::max<Eigen::Index>(0, i - 2); k < j; ++k) {
        if (j - k <= 2) sum -= lij(i, k) * lij(j, k);
      }
      if (i == j) {
        if (!(sum > 0.0)) {
          throw SingularOperator("PentadiagonalCholesky: matrix not positive definite at row " + std::to_string(i));
        }
        lij(i, i) = std::sqrt(sum);
      } else {
        lij(i, j) = sum / lij(j, j);
      }
    }
  }
}

Eigen::VectorXd PentadiagonalCholesky::solve(const Eigen::VectorXd& rhs) const {
  ++solve_stats().linear_solves;
  const Eigen::Index n = l_.rows();
  Eigen::VectorXd y = rhs;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i >= 1) y[i] -= l_(i, 1) * y[i - 1];
    if (i >= 2) y[i] -= l_(i, 0) * y[i - 2];
    y[i] /= l_(i, 2);
  }
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    if (i + 1 < n) y[i] -= l_(i + 1, 1) * y[i + 1];
    if (i + 2 < n) y[i] -= l_(i + 2, 0) * y[i + 2];
    y[i] /= l_(i, 2);
  }
  return y;
}

DirichletSpectrum::DirichletSpectrum(std::size_t n_interior)
    : q_(static_cast<Eigen::Index>(n_interior), static_cast<Eigen::Index>(n_interior)),
      lambda_(static_cast<Eigen::Index>(n_interior)) {
  const auto n = static_cast<Eigen::Index>(n_interior);
  const double h = 1.0 / static_cast<double>(n + 1);
  const double scale = std::sqrt(2.0 * h);
  for (Eigen::Index k = 0; k < n; ++k) {
    lambda_[k] = (2.0 - 2.0 * std::cos(static_cast<double>(k + 1) * std::numbers::pi * h)) / (h * h);
    for (Eigen::Index j = 0; j < n; ++j) {
      q_(j, k) = scale * std::sin(static_cast<double>((j + 1) * (k + 1)) * std::numbers::pi * h);
    }
  }
}

Eigen::VectorXd DirichletSpectrum::apply_diagonal(const Eigen::VectorXd& weights, const Eigen::VectorXd& v) const {
  const Eigen::VectorXd coeffs = q_.transpose() * v;
  return q_ * weights.cwiseProduct(coeffs);
}

}  // namespace aaoreg
