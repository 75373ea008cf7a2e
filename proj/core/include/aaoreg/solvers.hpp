#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aaoreg/operators.hpp"

namespace aaoreg {

enum class Paradigm { tikhonov, irgnm, landweber };
enum class Formulation { aao, reduced };
enum class RegTarget { x_only, x_and_u };
enum class AlphaRule { a_priori, sigma_rule };
enum class MuPolicy { fixed, safeguarded };

struct SolverConfig {
  Paradigm paradigm = Paradigm::irgnm;
  Formulation formulation = Formulation::aao;
  RegTarget reg_target = RegTarget::x_only;
  double rho = 1.0;
  double tau_sq = 4.0;

  // alpha_k = alpha0 * alpha_decay^k
  double alpha0 = 10.0;
  double alpha_decay = 0.7;
  AlphaRule alpha_rule = AlphaRule::a_priori;
  double sigma_lo = 0.5;
  double sigma_hi = 0.9;

  // fixed: mu is the step; safeguarded: step = mu / ||F'||^2
  MuPolicy mu_policy = MuPolicy::safeguarded;
  double mu = 0.9;
  std::size_t mu_refresh = 10000;
  std::size_t norm_iterations = 100;

  std::size_t max_outer = 200;
  std::size_t max_inner = 50;
  double newton_tol = 1e-10;
  std::size_t max_newton = 100;

  // Unset means l2, except h2 for the all-at-once Landweber update.
  std::optional<StateNorm> state_norm;

  std::optional<GridFunction> x0;  // zero when unset
  std::optional<GridFunction> u0;

  std::size_t trace_stride = 1;  // record every trace_stride-th iteration
  bool record_timing = true;

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;

  StateNorm effective_state_norm() const;
  GridFunction prior_x(const Grid1D& grid) const;
  GridFunction prior_u(const Grid1D& grid) const;
  StateSolveOptions state_options() const { return StateSolveOptions{newton_tol, max_newton}; }
};

enum class StopReason { discrepancy_met, iteration_cap, reduced_state_failure, singular_operator };

std::string_view to_string(StopReason r);
std::string_view to_string(Paradigm p);
std::string_view to_string(Formulation f);

struct IterationRecord {
  std::size_t k = 0;
  double alpha = 0.0;
  double model_misfit = 0.0;
  double obs_misfit = 0.0;
  double misfit = 0.0;
  std::optional<double> sigma;
  double wall_s = 0.0;
};

struct RunTrace {
  explicit RunTrace(const Grid1D& grid) : x_final(grid), u_final(grid) {}

  std::vector<IterationRecord> records;
  StopReason stop_reason = StopReason::iteration_cap;
  std::size_t k_star = 0;
  GridFunction x_final;
  GridFunction u_final;
  double wall_time_s = 0.0;
  double final_misfit = 0.0;
  bool band_skipped = false;  // Tikhonov alpha search only
  std::string note;

  bool failed() const noexcept {
    return stop_reason == StopReason::reduced_state_failure || stop_reason == StopReason::singular_operator;
  }
};

/// (rho/2)||A(x,u) - y_mod||^2 + (1/2)||u - y_obs||^2.
double misfit_S(const ProblemInstance& p, const AaoPoint& z, const DataPair& d);

/// Stopping threshold tau^2 delta^2 / 2 on misfit_S; for delta = 0 the
/// tolerance 1e-12 * max(1, initial_misfit) is used instead.
double discrepancy_threshold(double tau_sq, double delta, double initial_misfit);

/// Misfit of the linearized prediction at z_next over the misfit at z_k.
/// Throws std::domain_error if the misfit at z_k is zero.
double sigma_ratio(const ProblemInstance& p, const AaoPoint& z_k, const AaoPoint& z_next, const DataPair& d);

/// Minimizer of the linearized, regularized joint least-squares problem at z_k.
AaoPoint irgnm_aao_step(const ProblemInstance& p, const AaoPoint& z_k, const DataPair& d, double alpha,
                        const SolverConfig& cfg);

/// Minimizer of 1/2||F(x) + F'(x)(x' - x) - y||^2 + alpha/2 ||x' - x0||^2.
GridFunction irgnm_reduced_step(const ReducedEval& e, const GridFunction& y_obs, double alpha,
                                const SolverConfig& cfg);

RunTrace irgnm_run(const ProblemInstance& p, const DataPair& d, const SolverConfig& cfg);

/// One gradient step on the joint misfit. No linear system is solved; the
/// state gradient is mapped through the Riesz map of `riesz`.
AaoPoint landweber_aao_step(const ProblemInstance& p, const AaoPoint& z_k, const DataPair& d, double mu,
                            const StateRiesz& riesz);

/// x - mu F'(x)* (F(x) - y_obs).
GridFunction landweber_reduced_step(const ReducedEval& e, const GridFunction& y_obs, double mu);

/// ||F'(z)|| of the joint map, model block weighted by sqrt(rho), with the
/// state measured in `riesz`'s norm. Uses operator applications only.
double aao_operator_norm(const ProblemInstance& p, const AaoPoint& z, const StateRiesz& riesz, double rho,
                         std::size_t iterations);

/// ||F'(x)|| of the reduced map.
double reduced_operator_norm(const ReducedEval& e, std::size_t iterations);

RunTrace landweber_run(const ProblemInstance& p, const DataPair& d, const SolverConfig& cfg);

struct TikhonovResult {
  explicit TikhonovResult(const Grid1D& grid) : point(AaoPoint::zeros(grid)) {}

  AaoPoint point;  // reduced variant: u = S(x)
  bool converged = false;
  bool state_failure = false;
  std::size_t iterations = 0;
  double objective = 0.0;
  double gradient_norm = 0.0;
  double misfit = 0.0;
  std::string note;
};

/// Damped Gauss-Newton on the Tikhonov functional at fixed alpha, starting
/// from `start` (priors when null).
TikhonovResult tikhonov_minimize(const ProblemInstance& p, const DataPair& d, double alpha, const SolverConfig& cfg,
                                 const AaoPoint* start = nullptr);

struct AlphaSearchResult {
  explicit AlphaSearchResult(const Grid1D& grid) : result(grid) {}

  double alpha = 0.0;
  std::size_t index = 0;
  TikhonovResult result;
  bool found = false;
  bool band_skipped = false;
  std::vector<double> misfits;  // along the search path
};

/// First alpha0 * alpha_decay^j whose minimizer has delta^2/2 <= S <= tau^2 delta^2/2.
AlphaSearchResult tikhonov_alpha_search(const ProblemInstance& p, const DataPair& d, const SolverConfig& cfg);

/// Dispatches on cfg.paradigm and cfg.formulation.
RunTrace run_solver(const ProblemInstance& p, const DataPair& d, const SolverConfig& cfg);

}  // namespace aaoreg
