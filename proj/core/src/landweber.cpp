#include <chrono>
#include <cmath>
#include <optional>

#include "aaoreg/solvers.hpp"

namespace aaoreg {

namespace {
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }
}  // namespace

AaoPoint landweber_aao_step(const ProblemInstance& p, const AaoPoint& z_k, const DataPair& d, double mu,
                            const StateRiesz& riesz) {
  const AaoImage weighted{d.rho * (residual_A(p, z_k.x, z_k.u) - d.y_mod), z_k.u - d.y_obs};
  const AaoPoint g = aao_jacobian_adjoint_apply(p, z_k, weighted);
  return AaoPoint{z_k.x - mu * g.x, z_k.u - mu * riesz.riesz_apply(g.u)};
}

GridFunction landweber_reduced_step(const ReducedEval& e, const GridFunction& y_obs, double mu) {
  return e.x - mu * reduced_adjoint_apply(e, e.u - y_obs);
}

double aao_operator_norm(const ProblemInstance& p, const AaoPoint& z, const StateRiesz& riesz, double rho,
                         std::size_t iterations) {
  const Grid1D& grid = p.grid;
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double w = std::sqrt(rho);
  const PdeJacobian j = jacobian_at(p, z.x, z.u);

  const LinearMap apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    const GridFunction dx(grid, v.head(n));
    const GridFunction du(grid, v.tail(n));
    Eigen::VectorXd out(2 * n);
    out << w * (j.apply_k(du) - dx).values(), du.values();
    return out;
  };
  const LinearMap adjoint = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    const GridFunction m(grid, w * v.head(n));
    const GridFunction o(grid, v.tail(n));
    Eigen::VectorXd out(2 * n);
    out << (-m).values(), riesz.riesz_apply(j.apply_k(m) + o).values();
    return out;
  };
  const InnerProduct domain = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return grid.h() * a.head(n).dot(b.head(n)) +
           riesz.inner(GridFunction(grid, a.tail(n)), GridFunction(grid, b.tail(n)));
  };
  return operator_norm_estimate(apply, adjoint, 2 * n, iterations, 1, domain);
}

double reduced_operator_norm(const ReducedEval& e, std::size_t iterations) {
  const Grid1D& grid = e.x.grid();
  const LinearMap apply = [&](const Eigen::VectorXd& v) {
    return reduced_derivative_apply(e, GridFunction(grid, v)).values();
  };
  const LinearMap adjoint = [&](const Eigen::VectorXd& v) {
    return reduced_adjoint_apply(e, GridFunction(grid, v)).values();
  };
  return operator_norm_estimate(apply, adjoint, static_cast<Eigen::Index>(grid.size()), iterations, 1);
}

namespace {

void push(RunTrace& trace, IterationRecord rec, std::size_t stride, Clock::time_point t0, bool force) {
  rec.wall_s = seconds_since(t0);
  if (force || rec.k % stride == 0) trace.records.push_back(rec);
}

RunTrace landweber_aao_run(const ProblemInstance& p, const DataPair& d, const SolverConfig& cfg) {
  const auto t0 = Clock::now();
  RunTrace trace(p.grid);
  const StateRiesz riesz(p.grid, cfg.effective_state_norm());
  AaoPoint z{cfg.prior_x(p.grid), cfg.prior_u(p.grid)};
  double threshold = 0.0;
  double step = cfg.mu;

  for (std::size_t k = 0;; ++k) {
    IterationRecord rec;
    rec.k = k;
    const GridFunction model = residual_A(p, z.x, z.u) - d.y_mod;
    const GridFunction obs = z.u - d.y_obs;
    rec.model_misfit = 0.5 * d.rho * inner(model, model);
    rec.obs_misfit = 0.5 * inner(obs, obs);
    rec.misfit = rec.model_misfit + rec.obs_misfit;
    if (k == 0) threshold = discrepancy_threshold(cfg.tau_sq, d.delta, rec.misfit);
    trace.final_misfit = rec.misfit;
    trace.k_star = k;

    if (rec.misfit <= threshold) {
      trace.stop_reason = StopReason::discrepancy_met;
      push(trace, rec, cfg.trace_stride, t0, true);
      break;
    }
    if (k >= cfg.max_outer || !std::isfinite(rec.misfit)) {
      trace.stop_reason = StopReason::iteration_cap;
      if (!std::isfinite(rec.misfit)) trace.note = "misfit diverged";
      push(trace, rec, cfg.trace_stride, t0, true);
      break;
    }
    if (cfg.mu_policy == MuPolicy::safeguarded && k % cfg.mu_refresh == 0) {
      const double op_norm = aao_operator_norm(p, z, riesz, d.rho, cfg.norm_iterations);
      step = cfg.mu / (op_norm * op_norm);
    }
    rec.alpha = step;
    z = landweber_aao_step(p, z, d, step, riesz);
    push(trace, rec, cfg.trace_stride, t0, false);
  }
  trace.x_final = z.x;
  trace.u_final = z.u;
  trace.wall_time_s = seconds_since(t0);
  return trace;
}

RunTrace landweber_reduced_run(const ProblemInstance& p, const DataPair& d, const SolverConfig& cfg) {
  const auto t0 = Clock::now();
  RunTrace trace(p.grid);
  GridFunction x = cfg.prior_x(p.grid);
  std::optional<GridFunction> warm;
  double threshold = 0.0;
  double step = cfg.mu;

  for (std::size_t k = 0;; ++k) {
    trace.k_star = k;
    ReducedResult res = reduced_eval(p, x, cfg.state_options(), warm ? &*warm : nullptr);
    if (warm && std::holds_alternative<NonconvergenceReport>(res)) {
      res = reduced_eval(p, x, cfg.state_options());  // a cold start may still find the root
    }
    if (auto* failure = std::get_if<NonconvergenceReport>(&res)) {
      trace.stop_reason = StopReason::reduced_state_failure;
      trace.note = failure->reason;
      trace.x_final = x;
      trace.u_final = failure->last_iterate;
      break;
    }
    const ReducedEval& e = std::get<ReducedEval>(res);
    trace.x_final = e.x;
    trace.u_final = e.u;

    IterationRecord rec;
    rec.k = k;
    const GridFunction obs = e.u - d.y_obs;
    rec.obs_misfit = 0.5 * inner(obs, obs);
    rec.misfit = rec.obs_misfit;
    if (k == 0) threshold = discrepancy_threshold(cfg.tau_sq, d.delta, rec.misfit);
    trace.final_misfit = rec.misfit;

    if (rec.misfit <= threshold) {
      trace.stop_reason = StopReason::discrepancy_met;
      push(trace, rec, cfg.trace_stride, t0, true);
      break;
    }
    if (k >= cfg.max_outer) {
      trace.stop_reason = StopReason::iteration_cap;
      push(trace, rec, cfg.trace_stride, t0, true);
      break;
    }
    try {
      if (cfg.mu_policy == MuPolicy::safeguarded && k % cfg.mu_refresh == 0) {
        const double op_norm = reduced_operator_norm(e, cfg.norm_iterations);
        step = cfg.mu / (op_norm * op_norm);
      }
      rec.alpha = step;
      x = landweber_reduced_step(e, d.y_obs, step);
    } catch (const SingularOperator& ex) {
      trace.stop_reason = StopReason::singular_operator;
      trace.note = ex.what();
      push(trace, rec, cfg.trace_stride, t0, true);
      break;
    }
    warm = e.u;
    push(trace, rec, cfg.trace_stride, t0, false);
  }
  trace.wall_time_s = seconds_since(t0);
  return trace;
}

}  // namespace

RunTrace landweber_run(const ProblemInstance& p, const DataPair& d, const SolverConfig& cfg) {
  cfg.validate();
  DataPair data = d;
  data.rho = cfg.rho;
  return cfg.formulation == Formulation::aao ? landweber_aao_run(p, data, cfg) : landweber_reduced_run(p, data, cfg);
}

}  // namespace aaoreg
