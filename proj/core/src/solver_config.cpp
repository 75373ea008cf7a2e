#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "aaoreg/solvers.hpp"

namespace aaoreg {

namespace {
void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("invalid solver config: " + what);
}
}  // namespace

void SolverConfig::validate() const {
  require(rho > 0.0, "rho must be positive");
  require(tau_sq > 1.0, "tau_sq must exceed 1");
  require(alpha0 > 0.0, "alpha0 must be positive");
  require(alpha_decay > 0.0 && alpha_decay < 1.0, "alpha_decay must lie in (0,1)");
  if (alpha_rule == AlphaRule::sigma_rule) {
    require(sigma_lo > 0.0 && sigma_lo < sigma_hi && sigma_hi < 1.0, "need 0 < sigma_lo < sigma_hi < 1");
  }
  require(mu > 0.0, "mu must be positive");
  require(mu_refresh >= 1, "mu_refresh must be at least 1");
  require(norm_iterations >= 1, "norm_iterations must be at least 1");
  require(max_inner >= 1, "max_inner must be at least 1");
  require(newton_tol > 0.0, "newton_tol must be positive");
  require(max_newton >= 1, "max_newton must be at least 1");
  require(trace_stride >= 1, "trace_stride must be at least 1");
  if (x0 && u0) require(x0->grid() == u0->grid(), "x0 and u0 live on different grids");
}

StateNorm SolverConfig::effective_state_norm() const {
  if (state_norm) return *state_norm;
  return paradigm == Paradigm::landweber && formulation == Formulation::aao ? StateNorm::h2 : StateNorm::l2;
}

GridFunction SolverConfig::prior_x(const Grid1D& grid) const {
  if (!x0) return GridFunction(grid);
  if (!(x0->grid() == grid)) throw DimensionError("SolverConfig: x0 grid mismatch");
  return *x0;
}

GridFunction SolverConfig::prior_u(const Grid1D& grid) const {
  if (!u0) return GridFunction(grid);
  if (!(u0->grid() == grid)) throw DimensionError("SolverConfig: u0 grid mismatch");
  return *u0;
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::discrepancy_met: return "discrepancy_met";
    case StopReason::iteration_cap: return "iteration_cap";
    case StopReason::reduced_state_failure: return "reduced_state_failure";
    case StopReason::singular_operator: return "singular_operator";
  }
  return "unknown";
}

std::string_view to_string(Paradigm p) {
  switch (p) {
    case Paradigm::tikhonov: return "tikhonov";
    case Paradigm::irgnm: return "irgnm";
    case Paradigm::landweber: return "landweber";
  }
  return "unknown";
}

std::string_view to_string(Formulation f) { return f == Formulation::aao ? "aao" : "reduced"; }

RunTrace run_solver(const ProblemInstance& p, const DataPair& d, const SolverConfig& cfg) {
  switch (cfg.paradigm) {
    case Paradigm::irgnm: return irgnm_run(p, d, cfg);
    case Paradigm::landweber: return landweber_run(p, d, cfg);
    case Paradigm::tikhonov: break;
  }

  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RunTrace trace(p.grid);
  AlphaSearchResult search = tikhonov_alpha_search(p, d, cfg);
  for (std::size_t j = 0; j < search.misfits.size(); ++j) {
    IterationRecord rec;
    rec.k = j;
    rec.alpha = cfg.alpha0 * std::pow(cfg.alpha_decay, static_cast<double>(j));
    rec.misfit = search.misfits[j];
    trace.records.push_back(rec);
  }
  trace.k_star = search.index;
  trace.x_final = search.result.point.x;
  trace.u_final = search.result.point.u;
  trace.final_misfit = search.result.misfit;
  trace.band_skipped = search.band_skipped;
  trace.note = search.result.note;
  trace.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (search.result.state_failure) {
    trace.stop_reason = StopReason::reduced_state_failure;
  } else {
    trace.stop_reason = search.found ? StopReason::discrepancy_met : StopReason::iteration_cap;
  }
  return trace;
}

}  // namespace aaoreg
