#include "oracles.hpp"

#include <algorithm>

namespace aaoreg::oracle {

GridFunction Rng::field(const Grid1D& grid, double scale) {
  return GridFunction(grid, vector(static_cast<Eigen::Index>(grid.size()), scale));
}

Eigen::VectorXd Rng::vector(Eigen::Index n, double scale) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * gauss();
  return v;
}

Eigen::MatrixXd dense_neg_laplacian(std::size_t n) {
  const double h = 1.0 / static_cast<double>(n + 1);
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    a(i, i) = 2.0;
    if (i > 0) a(i, i - 1) = -1.0;
    if (i + 1 < m) a(i, i + 1) = -1.0;
  }
  return a / (h * h);
}

Eigen::MatrixXd dense_model_jacobian(double xi, const Eigen::VectorXd& u) {
  Eigen::MatrixXd k = dense_neg_laplacian(static_cast<std::size_t>(u.size()));
  k.diagonal() += 3.0 * xi * u.cwiseAbs2();
  return k;
}

Eigen::VectorXd dense_residual(double xi, const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  return dense_neg_laplacian(static_cast<std::size_t>(u.size())) * u + xi * u.array().cube().matrix() - x;
}

Eigen::MatrixXd dense_state_gram(std::size_t n, StateNorm kind) {
  if (kind == StateNorm::l2) return Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const Eigen::MatrixXd l = dense_neg_laplacian(n);
  return l * l;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> dense_aao_step(const DenseAaoStep& s, const Eigen::VectorXd& x,
                                                           const Eigen::VectorXd& u, const Eigen::VectorXd& y_mod,
                                                           const Eigen::VectorXd& y_obs, const Eigen::VectorXd& x0,
                                                           const Eigen::VectorXd& u0) {
  const Eigen::Index n = x.size();
  const auto nn = static_cast<std::size_t>(n);
  const Eigen::MatrixXd k = dense_model_jacobian(s.xi, u);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd gram = dense_state_gram(nn, s.state_norm);

  // Rows: weighted model block, observation block. Columns: dx, du.
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  j.topLeftCorner(n, n) = -id;
  j.topRightCorner(n, n) = k;
  j.bottomRightCorner(n, n) = id;
  Eigen::VectorXd w(2 * n);
  w.head(n).setConstant(s.rho);
  w.tail(n).setOnes();
  Eigen::MatrixXd pen = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  pen.topLeftCorner(n, n) = s.alpha * id;
  pen.bottomRightCorner(n, n) = s.alpha_u * gram;

  Eigen::VectorXd r(2 * n);
  r.head(n) = dense_residual(s.xi, x, u) - y_mod;
  r.tail(n) = u - y_obs;
  Eigen::VectorXd dev(2 * n);
  dev.head(n) = x - x0;
  dev.tail(n) = u - u0;

  const Eigen::MatrixXd lhs = j.transpose() * w.asDiagonal() * j + pen;
  const Eigen::VectorXd rhs = -j.transpose() * (w.asDiagonal() * r) - pen * dev;
  const Eigen::VectorXd d = lhs.fullPivLu().solve(rhs);
  return {x + d.head(n), u + d.tail(n)};
}

Eigen::VectorXd dense_linear_tikhonov(const Eigen::VectorXd& y, const Eigen::VectorXd& x0, double alpha) {
  const Eigen::Index n = y.size();
  const Eigen::MatrixXd t = dense_neg_laplacian(static_cast<std::size_t>(n)).inverse();
  const Eigen::MatrixXd lhs = t.transpose() * t + alpha * Eigen::MatrixXd::Identity(n, n);
  return x0 + lhs.fullPivLu().solve(t.transpose() * (y - t * x0));
}

Eigen::VectorXd dense_linear_landweber(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double mu) {
  const Eigen::MatrixXd t = dense_neg_laplacian(static_cast<std::size_t>(x.size())).inverse();
  return x - mu * t.transpose() * (t * x - y);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> dense_aao_landweber(double xi, double rho, double mu, StateNorm kind,
                                                                const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                                                const Eigen::VectorXd& y_mod,
                                                                const Eigen::VectorXd& y_obs) {
  const Eigen::MatrixXd k = dense_model_jacobian(xi, u);
  const Eigen::VectorXd a = rho * (dense_residual(xi, x, u) - y_mod);
  const Eigen::VectorXd gx = -a;
  const Eigen::VectorXd gu = k.transpose() * a + (u - y_obs);
  const Eigen::MatrixXd gram = dense_state_gram(static_cast<std::size_t>(x.size()), kind);
  return {x - mu * gx, u - mu * gram.fullPivLu().solve(gu)};
}

double max_rel(const Eigen::VectorXd& a, const Eigen::VectorXd& ref) {
  return (a - ref).cwiseAbs().maxCoeff() / std::max(ref.cwiseAbs().maxCoeff(), 1e-300);
}

}  // namespace aaoreg::oracle
