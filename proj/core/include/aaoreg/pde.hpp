#pragma once

#include <cstddef>
#include <string>
#include <variant>

#include "aaoreg/grid.hpp"
#include "aaoreg/linalg.hpp"

namespace aaoreg {

/// Semilinear model -u'' + xi u^3 = b on (0,1), u(0) = u(1) = 0, together
/// with the ground truth pair used to synthesize data.
struct ProblemInstance {
  Grid1D grid;
  double xi = 0.0;
  GridFunction b_true;
  GridFunction u_true;
  bool manufactured = false;  // truth built from an analytic state, not a state solve

  /// Instance with zero truth, for callers that only need the model.
  static ProblemInstance model(const Grid1D& grid, double xi) {
    return ProblemInstance{grid, xi, GridFunction(grid), GridFunction(grid), false};
  }
};

/// Derivatives of A(x,u) = -Δ_h u + xi u^3 - x at one point:
/// A_u = K = -Δ_h + 3 xi diag(u^2) and A_x = L = -I.
class PdeJacobian {
 public:
  PdeJacobian(const Grid1D& grid, SymTridiagonal k);

  const Grid1D& grid() const noexcept { return grid_; }
  const SymTridiagonal& k() const noexcept { return k_; }

  GridFunction apply_k(const GridFunction& v) const;
  GridFunction apply_l(const GridFunction& v) const { return -v; }

  /// Throws SingularOperator if A_u is numerically singular.
  TridiagonalFactor factor() const { return TridiagonalFactor(k_); }

 private:
  Grid1D grid_;
  SymTridiagonal k_;
};

/// -Δ_h on the grid as a tridiagonal matrix.
SymTridiagonal dirichlet_laplacian(const Grid1D& grid);

/// (-Δ_h f)_i = (2 f_i - f_{i-1} - f_{i+1}) / h^2 with zero boundary values.
GridFunction laplacian_apply(const Grid1D& grid, const GridFunction& f);

/// Model residual -Δ_h u + xi u^3 - x.
GridFunction residual_A(const ProblemInstance& p, const GridFunction& x, const GridFunction& u);

PdeJacobian jacobian_at(const ProblemInstance& p, const GridFunction& x, const GridFunction& u);

struct StateSolution {
  GridFunction u;
  double residual_norm = 0.0;
  std::size_t iterations = 0;
};

/// The damped Newton iteration could not find a root of A(x, .). For xi
/// below the ellipticity threshold this is the expected outcome.
struct NonconvergenceReport {
  GridFunction last_iterate;
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  std::string reason;
};

using StateResult = std::variant<StateSolution, NonconvergenceReport>;

/// Damped Newton for A(x,u) = 0 in u: tridiagonal Newton systems with K,
/// Armijo backtracking on ||A|| (factor 0.5, smallest step 2^-20).
StateResult solve_state(const ProblemInstance& p, const GridFunction& x, const GridFunction& u_init, double tol,
                        std::size_t max_newton);

/// Solves K v = rhs.
GridFunction solve_linearized(const PdeJacobian& j, const GridFunction& rhs);

/// Solves K^* w = rhs. K is symmetric for this discretization, so this is
/// the same system as solve_linearized.
GridFunction solve_adjoint(const PdeJacobian& j, const GridFunction& rhs);

}  // namespace aaoreg
