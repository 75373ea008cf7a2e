#include "aaoreg/diagnostics.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

namespace aaoreg {

double range_invariance_gap(const ProblemInstance& p, const GridFunction& u, const GridFunction& u_tilde,
                            StateNorm norm_kind) {
  require_same_grid(u, u_tilde, "range_invariance_gap");
  const Eigen::VectorXd diag = 3.0 * p.xi * (u_tilde.values().cwiseAbs2() - u.values().cwiseAbs2());
  if (norm_kind == StateNorm::l2) return diag.cwiseAbs().maxCoeff();

  const Eigen::MatrixXd lap = dirichlet_laplacian(u.grid()).dense();
  const Eigen::MatrixXd m = diag.asDiagonal() * lap.inverse();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()[0];
}

SourceElements source_condition_elements_linear(const ProblemInstance& p, const GridFunction& x_dag,
                                                const GridFunction& x0, const GridFunction& u0) {
  if (p.xi != 0.0) throw std::invalid_argument("source_condition_elements_linear: needs the linear model xi = 0");
  require_same_grid(x_dag, x0, "source_condition_elements_linear");
  require_same_grid(x_dag, u0, "source_condition_elements_linear");
  const Grid1D& grid = x_dag.grid();
  const auto n = static_cast<Eigen::Index>(grid.size());

  const Eigen::MatrixXd k = dirichlet_laplacian(grid).dense();
  const Eigen::MatrixXd s = k.inverse();
  // h-weighted adjoints coincide with transposes on a uniform grid
  const Eigen::MatrixXd t = Eigen::MatrixXd::Identity(n, n) + s.transpose() * s;
  const Eigen::VectorXd dev = x_dag.values() - x0.values();
  const Eigen::VectorXd rhs = t * dev - s.transpose() * (u0.values() - s * x0.values());

  const Eigen::VectorXd v_obs = s.transpose().colPivHouseholderQr().solve(rhs);
  const double residual = std::sqrt(grid.h()) * (s.transpose() * v_obs - rhs).norm();
  const Eigen::VectorXd u_dag = s * x_dag.values();
  const Eigen::VectorXd v_mod = k.transpose().colPivHouseholderQr().solve(u_dag - u0.values() - v_obs);
  return SourceElements{GridFunction(grid, v_obs), GridFunction(grid, v_mod), residual};
}

double log_log_slope(const std::vector<double>& deltas, const std::vector<double>& errors) {
  if (deltas.size() != errors.size() || deltas.size() < 2) {
    throw std::invalid_argument("log_log_slope: need at least two matching points");
  }
  const auto m = static_cast<double>(deltas.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double lx = std::log(deltas[i]);
    const double ly = std::log(errors[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

RateFit fit_rate(const std::function<std::optional<double>(double)>& run, const std::vector<double>& deltas) {
  if (deltas.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 noise levels");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0)) throw std::invalid_argument("fit_rate: noise levels must be positive");
    if (i > 0 && !(deltas[i] < deltas[i - 1])) throw std::invalid_argument("fit_rate: deltas must decrease");
  }
  RateFit fit;
  for (double delta : deltas) {
    const std::optional<double> err = run(delta);
    if (!err || !(*err > 0.0) || !std::isfinite(*err)) continue;
    fit.deltas.push_back(delta);
    fit.errors.push_back(*err);
  }
  if (fit.deltas.size() < 3) throw std::runtime_error("fit_rate: fewer than 3 successful runs");
  fit.slope = log_log_slope(fit.deltas, fit.errors);
  return fit;
}

SolverConfig rate_solver_defaults() {
  SolverConfig cfg;
  cfg.paradigm = Paradigm::irgnm;
  cfg.formulation = Formulation::aao;
  cfg.reg_target = RegTarget::x_and_u;
  cfg.max_outer = 200;
  return cfg;
}

ProblemInstance rate_problem(const RateExperiment& ex) {
  const Grid1D grid(ex.n_interior);
  ProblemInstance p = ProblemInstance::model(grid, 0.0);
  const PdeJacobian k = jacobian_at(p, p.b_true, p.u_true);
  GridFunction x(grid);
  if (ex.truth == RateTruth::source_smooth) {
    x = solve_adjoint(k, GridFunction::constant(grid, 1.0));
  } else {
    x = GridFunction::sample(grid, [](double s) { return s; });
  }
  GridFunction u = solve_linearized(k, x);
  const double scale = 1.0 / norm(u);
  p.b_true = scale * x;
  p.u_true = scale * u;
  return p;
}

std::optional<double> rate_run(const RateExperiment& ex, double delta) {
  const ProblemInstance p = rate_problem(ex);
  GridFunction noise(p.grid);
  std::mt19937_64 rng(ex.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < p.grid.size(); ++i) noise[i] = gauss(rng);
  noise *= delta / norm(noise);

  SolverConfig cfg = ex.solver;
  cfg.tau_sq = ex.tau_sq;
  const RunTrace trace = run_solver(p, DataPair::observed(p.u_true + noise, delta), cfg);
  if (trace.stop_reason != StopReason::discrepancy_met) return std::nullopt;
  return norm(trace.x_final - p.b_true);
}

}  // namespace aaoreg
