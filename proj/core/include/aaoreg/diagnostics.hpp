#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "aaoreg/solvers.hpp"

namespace aaoreg {

/// Norm of R - I where F'(u~) = F'(u) R, i.e. of 3 xi diag(u~^2 - u^2) taken
/// from the state norm into L2. For l2 this is max_i |3 xi (u~_i^2 - u_i^2)|;
/// for h2 it is the largest singular value of that diagonal times (-Δ_h)^-1.
double range_invariance_gap(const ProblemInstance& p, const GridFunction& u, const GridFunction& u_tilde,
                            StateNorm norm_kind = StateNorm::l2);

struct SourceElements {
  GridFunction v_obs;
  GridFunction v_mod;
  double residual = 0.0;  // ||S* v_obs - rhs|| of the least-squares solve
};

/// Source elements of the all-at-once benchmark condition for the linear
/// model (xi = 0): with S = (-Δ_h)^-1 and T = I + S*S, v_obs solves
/// S* v = T(x_dag - x0) - S*(u0 - S x0) in the least-squares sense and
/// v_mod = K^-1 (u_dag - u0 - v_obs). Throws std::invalid_argument if xi != 0.
SourceElements source_condition_elements_linear(const ProblemInstance& p, const GridFunction& x_dag,
                                                const GridFunction& x0, const GridFunction& u0);

struct RateFit {
  std::vector<double> deltas;
  std::vector<double> errors;
  double slope = 0.0;
};

/// Least-squares slope of log(error) against log(delta).
double log_log_slope(const std::vector<double>& deltas, const std::vector<double>& errors);

/// Calls `run` for each delta (strictly decreasing, at least 3) and fits the
/// slope over the points that produced an error. Throws std::runtime_error if
/// fewer than 3 points remain.
RateFit fit_rate(const std::function<std::optional<double>(double)>& run, const std::vector<double>& deltas);

enum class RateTruth { source_smooth, endpoint_mismatch };

/// aao IRGNM with joint regularization and discrepancy stopping.
SolverConfig rate_solver_defaults();

struct RateExperiment {
  std::size_t n_interior = 99;
  RateTruth truth = RateTruth::source_smooth;
  double tau_sq = 4.0;
  std::uint64_t seed = 1;
  SolverConfig solver = rate_solver_defaults();
};

/// Linear (xi = 0) instance for rate studies. source_smooth takes
/// x_dag = S*(1), which satisfies the benchmark source condition;
/// endpoint_mismatch takes x_dag proportional to s, which does not vanish at
/// s = 1. Both are scaled so that ||u_dag|| = 1.
ProblemInstance rate_problem(const RateExperiment& ex);

/// Error ||x_k* - x_dag|| for noise of norm exactly delta, or nothing if the
/// run failed.
std::optional<double> rate_run(const RateExperiment& ex, double delta);

}  // namespace aaoreg
