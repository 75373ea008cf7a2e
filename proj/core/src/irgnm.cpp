#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "aaoreg/solvers.hpp"

namespace aaoreg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

constexpr double kAlphaMin = 1e-12;
constexpr double kAlphaMax = 1e12;
constexpr int kBisectionSteps = 60;
constexpr std::size_t kDenseReducedLimit = 200;

/// Bisection on log(alpha) for sigma(alpha) in [lo, hi]; sigma grows with alpha.
double bisect_alpha(const std::function<double(double)>& sigma_of, double lo_band, double hi_band,
                    double& sigma_out) {
  double a = std::log(kAlphaMin);
  double b = std::log(kAlphaMax);
  const double s_a = sigma_of(std::exp(a));
  if (s_a >= hi_band) {
    sigma_out = s_a;
    return std::exp(a);
  }
  const double s_b = sigma_of(std::exp(b));
  if (s_b <= lo_band) {
    sigma_out = s_b;
    return std::exp(b);
  }
  double mid = 0.5 * (a + b);
  double s_mid = 0.0;
  for (int i = 0; i < kBisectionSteps; ++i) {
    mid = 0.5 * (a + b);
    s_mid = sigma_of(std::exp(mid));
    if (s_mid < lo_band) {
      a = mid;
    } else if (s_mid > hi_band) {
      b = mid;
    } else {
      break;
    }
  }
  sigma_out = s_mid;
  return std::exp(mid);
}

GridFunction solve_with(const TridiagonalFactor& f, const GridFunction& v) {
  return GridFunction(v.grid(), f.solve(v.values()));
}

struct TraceWriter {
  RunTrace& trace;
  std::size_t stride;
  Clock::time_point t0;

  void push(IterationRecord rec, bool force) {
    rec.wall_s = seconds_since(t0);
    if (force || rec.k % stride == 0) trace.records.push_back(rec);
  }
};

}  // namespace

AaoPoint irgnm_aao_step(const ProblemInstance& p, const AaoPoint& z_k, const DataPair& d, double alpha,
                        const SolverConfig& cfg) {
  if (!(alpha > 0.0)) throw std::invalid_argument("irgnm_aao_step: alpha must be positive");
  const Grid1D& grid = p.grid;
  const double rho = d.rho;
  const double alpha_u = cfg.reg_target == RegTarget::x_and_u ? alpha : 0.0;
  const bool h2 = cfg.effective_state_norm() == StateNorm::h2;

  const GridFunction a = residual_A(p, z_k.x, z_k.u) - d.y_mod;
  const GridFunction r = z_k.u - d.y_obs;
  const PdeJacobian j = jacobian_at(p, z_k.x, z_k.u);
  const GridFunction u_dev = z_k.u - cfg.prior_u(grid);
  const GridFunction gram_u_dev = h2 ? laplacian_apply(grid, laplacian_apply(grid, u_dev)) : u_dev;

  // Normal equations
  //   (rho + alpha) dx - rho K du                 = rhs_x
  //   -rho K dx + (rho K^2 + I + alpha_u M) du    = rhs_u
  // with dx eliminated, leaving a pentadiagonal SPD system in du.
  const GridFunction rhs_x = rho * a - alpha * (z_k.x - cfg.prior_x(grid));
  const GridFunction rhs_u = -rho * j.apply_k(a) - r - alpha_u * gram_u_dev;

  SymPentadiagonal schur = scaled_plus_identity(square(j.k()), rho * alpha / (rho + alpha), 1.0);
  if (alpha_u > 0.0) {
    if (h2) {
      const SymPentadiagonal m = square(dirichlet_laplacian(grid));
      schur.d0 += alpha_u * m.d0;
      schur.d1 += alpha_u * m.d1;
      schur.d2 += alpha_u * m.d2;
    } else {
      schur.d0.array() += alpha_u;
    }
  }
  const GridFunction schur_rhs = rhs_u + (rho / (rho + alpha)) * j.apply_k(rhs_x);
  const GridFunction du(grid, PentadiagonalCholesky(schur).solve(schur_rhs.values()));
  const GridFunction dx = (1.0 / (rho + alpha)) * (rhs_x + rho * j.apply_k(du));
  return AaoPoint{z_k.x + dx, z_k.u + du};
}

GridFunction irgnm_reduced_step(const ReducedEval& e, const GridFunction& y_obs, double alpha,
                                const SolverConfig& cfg) {
  if (!(alpha > 0.0)) throw std::invalid_argument("irgnm_reduced_step: alpha must be positive");
  if (!e.factor) throw SingularOperator("irgnm_reduced_step: A_u is singular at the current state");
  const Grid1D& grid = e.x.grid();
  const TridiagonalFactor& f = *e.factor;
  const auto n = static_cast<Eigen::Index>(grid.size());

  // F' = K^-1 is symmetric, so F'* F' = K^-2.
  const GridFunction rhs = solve_with(f, y_obs - e.u) + alpha * (cfg.prior_x(grid) - e.x);
  Eigen::VectorXd dx;
  if (grid.size() <= kDenseReducedLimit) {
    Eigen::MatrixXd g(n, n);
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(n);
    for (Eigen::Index c = 0; c < n; ++c) {
      unit[c] = 1.0;
      g.col(c) = f.solve(unit);
      unit[c] = 0.0;
    }
    Eigen::MatrixXd normal = g.transpose() * g;
    normal.diagonal().array() += alpha;
    Eigen::LLT<Eigen::MatrixXd> llt(normal);
    if (llt.info() != Eigen::Success) throw SingularOperator("irgnm_reduced_step: normal matrix not SPD");
    dx = llt.solve(rhs.values());
  } else {
    dx = Eigen::VectorXd::Zero(n);
    const auto normal_apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
      return f.solve(f.solve(v)) + alpha * v;
    };
    conjugate_gradient(normal_apply, rhs.values(), dx, 1e-10, 10 * grid.size());
  }
  return e.x + GridFunction(grid, dx);
}

namespace {

RunTrace irgnm_aao_run(const ProblemInstance& p, const DataPair& d, const SolverConfig& cfg) {
  const auto t0 = Clock::now();
  RunTrace trace(p.grid);
  TraceWriter out{trace, cfg.trace_stride, t0};
  const AaoPoint prior{cfg.prior_x(p.grid), cfg.prior_u(p.grid)};
  AaoPoint z = prior;
  double threshold = 0.0;

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
      out.push(rec, true);
      break;
    }
    if (k >= cfg.max_outer) {
      trace.stop_reason = StopReason::iteration_cap;
      out.push(rec, true);
      break;
    }

    try {
      if (cfg.alpha_rule == AlphaRule::a_priori) {
        rec.alpha = cfg.alpha0 * std::pow(cfg.alpha_decay, static_cast<double>(k));
        z = irgnm_aao_step(p, z, d, rec.alpha, cfg);
      } else if (sigma_ratio(p, z, prior, d) < cfg.sigma_hi) {
        rec.alpha = std::numeric_limits<double>::infinity();
        rec.sigma = sigma_ratio(p, z, prior, d);
        z = prior;
      } else {
        double sigma = 0.0;
        rec.alpha = bisect_alpha(
            [&](double alpha) { return sigma_ratio(p, z, irgnm_aao_step(p, z, d, alpha, cfg), d); }, cfg.sigma_lo,
            cfg.sigma_hi, sigma);
        rec.sigma = sigma;
        z = irgnm_aao_step(p, z, d, rec.alpha, cfg);
      }
    } catch (const SingularOperator& e) {
      trace.stop_reason = StopReason::singular_operator;
      trace.note = e.what();
      out.push(rec, true);
      break;
    }
    out.push(rec, false);
  }
  trace.x_final = z.x;
  trace.u_final = z.u;
  trace.wall_time_s = seconds_since(t0);
  return trace;
}

RunTrace irgnm_reduced_run(const ProblemInstance& p, const DataPair& d, const SolverConfig& cfg) {
  const auto t0 = Clock::now();
  RunTrace trace(p.grid);
  TraceWriter out{trace, cfg.trace_stride, t0};
  const GridFunction x0 = cfg.prior_x(p.grid);
  GridFunction x = x0;
  double threshold = 0.0;

  for (std::size_t k = 0;; ++k) {
    trace.k_star = k;
    ReducedResult res = reduced_eval(p, x, cfg.state_options());
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
      out.push(rec, true);
      break;
    }
    if (k >= cfg.max_outer) {
      trace.stop_reason = StopReason::iteration_cap;
      out.push(rec, true);
      break;
    }

    try {
      if (cfg.alpha_rule == AlphaRule::a_priori) {
        rec.alpha = cfg.alpha0 * std::pow(cfg.alpha_decay, static_cast<double>(k));
        x = irgnm_reduced_step(e, d.y_obs, rec.alpha, cfg);
      } else {
        const auto sigma_at = [&](const GridFunction& x_next) {
          const GridFunction pred = obs + reduced_derivative_apply(e, x_next - e.x);
          return 0.5 * inner(pred, pred) / rec.misfit;
        };
        const double sigma_prior = sigma_at(x0);
        if (sigma_prior < cfg.sigma_hi) {
          rec.alpha = std::numeric_limits<double>::infinity();
          rec.sigma = sigma_prior;
          x = x0;
        } else {
          double sigma = 0.0;
          rec.alpha = bisect_alpha([&](double alpha) { return sigma_at(irgnm_reduced_step(e, d.y_obs, alpha, cfg)); },
                                   cfg.sigma_lo, cfg.sigma_hi, sigma);
          rec.sigma = sigma;
          x = irgnm_reduced_step(e, d.y_obs, rec.alpha, cfg);
        }
      }
    } catch (const SingularOperator& ex) {
      trace.stop_reason = StopReason::singular_operator;
      trace.note = ex.what();
      out.push(rec, true);
      break;
    }
    out.push(rec, false);
  }
  trace.wall_time_s = seconds_since(t0);
  return trace;
}

}  // namespace

RunTrace irgnm_run(const ProblemInstance& p, const DataPair& d, const SolverConfig& cfg) {
  cfg.validate();
  DataPair data = d;
  data.rho = cfg.rho;
  return cfg.formulation == Formulation::aao ? irgnm_aao_run(p, data, cfg) : irgnm_reduced_run(p, data, cfg);
}

}  // namespace aaoreg
