#include "aaoreg/pde.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace aaoreg {

PdeJacobian::PdeJacobian(const Grid1D& grid, SymTridiagonal k) : grid_(grid), k_(std::move(k)) {}

GridFunction PdeJacobian::apply_k(const GridFunction& v) const {
  if (!(v.grid() == grid_)) throw DimensionError("PdeJacobian::apply_k: grid mismatch");
  return GridFunction(grid_, k_.apply(v.values()));
}

SymTridiagonal dirichlet_laplacian(const Grid1D& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double inv_h2 = 1.0 / (grid.h() * grid.h());
  return SymTridiagonal{Eigen::VectorXd::Constant(n, 2.0 * inv_h2), Eigen::VectorXd::Constant(n - 1, -inv_h2)};
}

GridFunction laplacian_apply(const Grid1D& grid, const GridFunction& f) {
  if (!(f.grid() == grid)) throw DimensionError("laplacian_apply: grid mismatch");
  return GridFunction(grid, dirichlet_laplacian(grid).apply(f.values()));
}

GridFunction residual_A(const ProblemInstance& p, const GridFunction& x, const GridFunction& u) {
  require_same_grid(x, u, "residual_A");
  if (!(x.grid() == p.grid)) throw DimensionError("residual_A: grid mismatch with problem");
  Eigen::VectorXd r = dirichlet_laplacian(p.grid).apply(u.values());
  r += p.xi * u.values().array().cube().matrix();
  r -= x.values();
  return GridFunction(p.grid, std::move(r));
}

PdeJacobian jacobian_at(const ProblemInstance& p, const GridFunction& x, const GridFunction& u) {
  require_same_grid(x, u, "jacobian_at");
  if (!(u.grid() == p.grid)) throw DimensionError("jacobian_at: grid mismatch with problem");
  SymTridiagonal k = dirichlet_laplacian(p.grid);
  k.diag += 3.0 * p.xi * u.values().cwiseAbs2();
  return PdeJacobian(p.grid, std::move(k));
}

namespace {

// Residual level that rounding alone produces at u; tighter tolerances cannot be met.
double roundoff_floor(const ProblemInstance& p, const GridFunction& x, const GridFunction& u) {
  const double h = p.grid.h();
  const GridFunction cubic = p.xi * hadamard(hadamard(u, u), u);
  return 16.0 * std::numeric_limits<double>::epsilon() * (4.0 / (h * h) * norm(u) + norm(cubic) + norm(x));
}

}  // namespace

StateResult solve_state(const ProblemInstance& p, const GridFunction& x, const GridFunction& u_init, double tol,
                        std::size_t max_newton) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_state: tol must be positive");
  ++solve_stats().state_solves;

  constexpr double kArmijo = 1e-4;
  constexpr double kMinStep = 1.0 / 1048576.0;  // 2^-20

  GridFunction u = u_init;
  GridFunction r = residual_A(p, x, u);
  double rn = norm(r);
  std::size_t it = 0;
  for (; it < max_newton; ++it) {
    if (rn <= tol) return StateSolution{std::move(u), rn, it};

    GridFunction direction(p.grid);
    try {
      direction = -solve_linearized(jacobian_at(p, x, u), r);
    } catch (const SingularOperator& e) {
      return NonconvergenceReport{std::move(u), rn, it, std::string("singular Newton system: ") + e.what()};
    }

    double step = 1.0;
    for (;;) {
      GridFunction trial = u + step * direction;
      GridFunction r_trial = residual_A(p, x, trial);
      const double rn_trial = norm(r_trial);
      if (std::isfinite(rn_trial) && rn_trial <= (1.0 - kArmijo * step) * rn) {
        u = std::move(trial);
        r = std::move(r_trial);
        rn = rn_trial;
        break;
      }
      step *= 0.5;
      if (step < kMinStep) {
        if (rn <= roundoff_floor(p, x, u)) return StateSolution{std::move(u), rn, it + 1};
        return NonconvergenceReport{std::move(u), rn, it + 1, "line search stalled"};
      }
    }
  }
  if (rn <= tol || rn <= roundoff_floor(p, x, u)) return StateSolution{std::move(u), rn, it};
  return NonconvergenceReport{std::move(u), rn, it, "Newton iteration limit reached"};
}

GridFunction solve_linearized(const PdeJacobian& j, const GridFunction& rhs) {
  if (!(rhs.grid() == j.grid())) throw DimensionError("solve_linearized: grid mismatch");
  return GridFunction(j.grid(), j.factor().solve(rhs.values()));
}

GridFunction solve_adjoint(const PdeJacobian& j, const GridFunction& rhs) {
  if (!(rhs.grid() == j.grid())) throw DimensionError("solve_adjoint: grid mismatch");
  return GridFunction(j.grid(), j.factor().solve(rhs.values()));
}

}  // namespace aaoreg
