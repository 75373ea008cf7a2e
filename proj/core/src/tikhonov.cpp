#include <cmath>
#include <stdexcept>
#include <optional>

#include "aaoreg/solvers.hpp"

namespace aaoreg {

namespace {

constexpr double kGradientTol = 1e-9;  // relative to max(1, initial gradient norm)
constexpr double kMinStep = 1.0 / 1048576.0;

struct AaoState {
  double objective;
  double misfit;
  double gradient_norm;
};

AaoState evaluate_aao(const ProblemInstance& p, const AaoPoint& z, const DataPair& d, double alpha,
                      const SolverConfig& cfg, bool with_gradient) {
  const Grid1D& grid = p.grid;
  const double alpha_u = cfg.reg_target == RegTarget::x_and_u ? alpha : 0.0;
  const bool h2 = cfg.effective_state_norm() == StateNorm::h2;

  const GridFunction a = residual_A(p, z.x, z.u) - d.y_mod;
  const GridFunction r = z.u - d.y_obs;
  const GridFunction x_dev = z.x - cfg.prior_x(grid);
  const GridFunction u_dev = z.u - cfg.prior_u(grid);
  const GridFunction gram_u_dev = h2 ? laplacian_apply(grid, laplacian_apply(grid, u_dev)) : u_dev;

  AaoState s{};
  s.misfit = 0.5 * d.rho * inner(a, a) + 0.5 * inner(r, r);
  s.objective = s.misfit + 0.5 * alpha * inner(x_dev, x_dev) + 0.5 * alpha_u * inner(u_dev, gram_u_dev);
  if (with_gradient) {
    const PdeJacobian j = jacobian_at(p, z.x, z.u);
    const GridFunction gx = -d.rho * a + alpha * x_dev;
    const GridFunction gu = d.rho * j.apply_k(a) + r + alpha_u * gram_u_dev;
    s.gradient_norm = std::sqrt(inner(gx, gx) + inner(gu, gu));
  }
  return s;
}

TikhonovResult minimize_aao(const ProblemInstance& p, const DataPair& d, double alpha, const SolverConfig& cfg,
                            const AaoPoint* start) {
  TikhonovResult out(p.grid);
  AaoPoint z = start ? *start : AaoPoint{cfg.prior_x(p.grid), cfg.prior_u(p.grid)};
  AaoState s = evaluate_aao(p, z, d, alpha, cfg, true);
  const double target = kGradientTol * std::max(1.0, s.gradient_norm);

  std::size_t it = 0;
  for (; it < cfg.max_inner && s.gradient_norm > target; ++it) {
    const AaoPoint direction = irgnm_aao_step(p, z, d, alpha, cfg) - z;
    double t = 1.0;
    bool accepted = false;
    while (t >= kMinStep) {
      AaoPoint trial = z + t * direction;
      const AaoState ts = evaluate_aao(p, trial, d, alpha, cfg, false);
      if (std::isfinite(ts.objective) && ts.objective <= s.objective) {
        z = std::move(trial);
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      out.note = "line search stalled";
      break;
    }
    const double previous = s.objective;
    s = evaluate_aao(p, z, d, alpha, cfg, true);
    if (s.objective == previous && norm(direction) * t <= 1e-14 * (1.0 + norm(z))) break;
  }
  out.point = z;
  out.iterations = it;
  out.objective = s.objective;
  out.misfit = s.misfit;
  out.gradient_norm = s.gradient_norm;
  out.converged = s.gradient_norm <= target;
  return out;
}

struct ReducedState {
  std::optional<ReducedEval> eval;
  double objective = 0.0;
  double misfit = 0.0;
};

ReducedState evaluate_reduced(const ProblemInstance& p, const GridFunction& x, const DataPair& d, double alpha,
                              const SolverConfig& cfg, const GridFunction* warm) {
  ReducedState s;
  ReducedResult res = reduced_eval(p, x, cfg.state_options(), warm);
  if (warm && std::holds_alternative<NonconvergenceReport>(res)) res = reduced_eval(p, x, cfg.state_options());
  if (!std::holds_alternative<ReducedEval>(res)) return s;
  s.eval.emplace(std::move(std::get<ReducedEval>(res)));
  const GridFunction r = s.eval->u - d.y_obs;
  const GridFunction x_dev = x - cfg.prior_x(p.grid);
  s.misfit = 0.5 * inner(r, r);
  s.objective = s.misfit + 0.5 * alpha * inner(x_dev, x_dev);
  return s;
}

double reduced_gradient_norm(const ReducedEval& e, const DataPair& d, double alpha, const SolverConfig& cfg) {
  const GridFunction g = reduced_adjoint_apply(e, e.u - d.y_obs) + alpha * (e.x - cfg.prior_x(e.x.grid()));
  return norm(g);
}

TikhonovResult minimize_reduced(const ProblemInstance& p, const DataPair& d, double alpha, const SolverConfig& cfg,
                                const AaoPoint* start) {
  TikhonovResult out(p.grid);
  const GridFunction x_start = start ? start->x : cfg.prior_x(p.grid);
  ReducedState s = evaluate_reduced(p, x_start, d, alpha, cfg, nullptr);
  if (!s.eval) {
    out.point.x = x_start;
    out.state_failure = true;
    out.note = "state solve failed at the starting point";
    return out;
  }
  double gnorm = reduced_gradient_norm(*s.eval, d, alpha, cfg);
  const double target = kGradientTol * std::max(1.0, gnorm);

  std::size_t it = 0;
  for (; it < cfg.max_inner && gnorm > target; ++it) {
    const GridFunction direction = irgnm_reduced_step(*s.eval, d.y_obs, alpha, cfg) - s.eval->x;
    double t = 1.0;
    bool accepted = false;
    while (t >= kMinStep) {
      ReducedState ts = evaluate_reduced(p, s.eval->x + t * direction, d, alpha, cfg, &s.eval->u);
      if (ts.eval && ts.objective <= s.objective) {
        s = std::move(ts);
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      out.note = "line search stalled";
      break;
    }
    gnorm = reduced_gradient_norm(*s.eval, d, alpha, cfg);
    if (norm(direction) * t <= 1e-14 * (1.0 + norm(s.eval->x))) break;
  }
  out.point = AaoPoint{s.eval->x, s.eval->u};
  out.iterations = it;
  out.objective = s.objective;
  out.misfit = s.misfit;
  out.gradient_norm = gnorm;
  out.converged = gnorm <= target;
  return out;
}

}  // namespace

TikhonovResult tikhonov_minimize(const ProblemInstance& p, const DataPair& d, double alpha, const SolverConfig& cfg,
                                 const AaoPoint* start) {
  if (!(alpha > 0.0)) throw std::invalid_argument("tikhonov_minimize: alpha must be positive");
  cfg.validate();
  DataPair data = d;
  data.rho = cfg.rho;
  return cfg.formulation == Formulation::aao ? minimize_aao(p, data, alpha, cfg, start)
                                             : minimize_reduced(p, data, alpha, cfg, start);
}

AlphaSearchResult tikhonov_alpha_search(const ProblemInstance& p, const DataPair& d, const SolverConfig& cfg) {
  if (!(d.delta > 0.0)) throw std::invalid_argument("tikhonov_alpha_search: needs a positive noise level");
  cfg.validate();
  const double lower = 0.5 * d.delta * d.delta;
  const double upper = cfg.tau_sq * lower;

  AlphaSearchResult out(p.grid);
  std::optional<AaoPoint> previous;
  for (std::size_t j = 0; j <= cfg.max_outer; ++j) {
    const double alpha = cfg.alpha0 * std::pow(cfg.alpha_decay, static_cast<double>(j));
    TikhonovResult res = tikhonov_minimize(p, d, alpha, cfg, previous ? &*previous : nullptr);
    out.alpha = alpha;
    out.index = j;
    if (res.state_failure) {
      out.result = std::move(res);
      return out;
    }
    out.misfits.push_back(res.misfit);
    previous = res.point;
    out.result = std::move(res);
    if (out.result.misfit <= upper) {
      out.found = true;
      out.band_skipped = out.result.misfit < lower;
      return out;
    }
  }
  return out;
}

}  // namespace aaoreg
