#include <algorithm>
#include <stdexcept>

#include "aaoreg/solvers.hpp"

namespace aaoreg {

double misfit_S(const ProblemInstance& p, const AaoPoint& z, const DataPair& d) {
  const GridFunction model = residual_A(p, z.x, z.u) - d.y_mod;
  const GridFunction obs = z.u - d.y_obs;
  return 0.5 * d.rho * inner(model, model) + 0.5 * inner(obs, obs);
}

double discrepancy_threshold(double tau_sq, double delta, double initial_misfit) {
  if (delta > 0.0) return 0.5 * tau_sq * delta * delta;
  return 1e-12 * std::max(1.0, initial_misfit);
}

double sigma_ratio(const ProblemInstance& p, const AaoPoint& z_k, const AaoPoint& z_next, const DataPair& d) {
  const double current = misfit_S(p, z_k, d);
  if (!(current > 0.0)) throw std::domain_error("sigma_ratio: misfit at the current iterate is zero");
  const AaoImage step = aao_jacobian_apply(p, z_k, z_next - z_k);
  const GridFunction model = residual_A(p, z_k.x, z_k.u) - d.y_mod + step.model;
  const GridFunction obs = z_next.u - d.y_obs;
  const double predicted = 0.5 * d.rho * inner(model, model) + 0.5 * inner(obs, obs);
  return predicted / current;
}

}  // namespace aaoreg
