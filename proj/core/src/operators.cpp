#include "aaoreg/operators.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace aaoreg {

Eigen::VectorXd AaoPoint::stacked() const {
  require_same_grid(x, u, "AaoPoint::stacked");
  const Eigen::Index n = x.values().size();
  Eigen::VectorXd v(2 * n);
  v << x.values(), u.values();
  return v;
}

AaoPoint AaoPoint::unstack(const Grid1D& grid, const Eigen::VectorXd& v) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (v.size() != 2 * n) throw DimensionError("AaoPoint::unstack: expected " + std::to_string(2 * n) + " entries");
  return AaoPoint{GridFunction(grid, v.head(n)), GridFunction(grid, v.tail(n))};
}

AaoPoint& AaoPoint::operator+=(const AaoPoint& o) {
  x += o.x;
  u += o.u;
  return *this;
}

AaoPoint& AaoPoint::operator-=(const AaoPoint& o) {
  x -= o.x;
  u -= o.u;
  return *this;
}

AaoPoint& AaoPoint::operator*=(double c) {
  x *= c;
  u *= c;
  return *this;
}

double inner(const AaoPoint& a, const AaoPoint& b) { return inner(a.x, b.x) + inner(a.u, b.u); }
double norm(const AaoPoint& a) { return std::sqrt(inner(a, a)); }
double inner(const AaoImage& a, const AaoImage& b) { return inner(a.model, b.model) + inner(a.obs, b.obs); }
double norm(const AaoImage& a) { return std::sqrt(inner(a, a)); }

StateRiesz::StateRiesz(const Grid1D& grid, StateNorm kind) : grid_(grid), kind_(kind) {
  if (kind_ == StateNorm::h2) {
    spectrum_.emplace(grid.size());
    inverse_weights_ = spectrum_->eigenvalues().cwiseAbs2().cwiseInverse();
  }
}

GridFunction StateRiesz::gram_apply(const GridFunction& v) const {
  if (kind_ == StateNorm::l2) return v;
  return laplacian_apply(grid_, laplacian_apply(grid_, v));
}

GridFunction StateRiesz::riesz_apply(const GridFunction& g) const {
  if (kind_ == StateNorm::l2) return g;
  if (!(g.grid() == grid_)) throw DimensionError("StateRiesz::riesz_apply: grid mismatch");
  return GridFunction(grid_, spectrum_->apply_diagonal(inverse_weights_, g.values()));
}

double StateRiesz::inner(const GridFunction& a, const GridFunction& b) const {
  if (kind_ == StateNorm::l2) return aaoreg::inner(a, b);
  return aaoreg::inner(laplacian_apply(grid_, a), laplacian_apply(grid_, b));
}

AaoImage aao_apply(const ProblemInstance& p, const AaoPoint& z) { return AaoImage{residual_A(p, z.x, z.u), z.u}; }

AaoImage aao_jacobian_apply(const ProblemInstance& p, const AaoPoint& z, const AaoPoint& d) {
  require_same_grid(d.x, d.u, "aao_jacobian_apply");
  const PdeJacobian j = jacobian_at(p, z.x, z.u);
  return AaoImage{j.apply_l(d.x) + j.apply_k(d.u), d.u};
}

AaoPoint aao_jacobian_adjoint_apply(const ProblemInstance& p, const AaoPoint& z, const AaoImage& w) {
  require_same_grid(w.model, w.obs, "aao_jacobian_adjoint_apply");
  const PdeJacobian j = jacobian_at(p, z.x, z.u);
  // K is symmetric, L* = L = -I.
  return AaoPoint{j.apply_l(w.model), j.apply_k(w.model) + w.obs};
}

ReducedResult reduced_eval(const ProblemInstance& p, const GridFunction& x, const StateSolveOptions& opts,
                           const GridFunction* warm_start) {
  const GridFunction start = warm_start ? *warm_start : GridFunction(p.grid);
  StateResult state = solve_state(p, x, start, opts.tol, opts.max_newton);
  if (auto* failure = std::get_if<NonconvergenceReport>(&state)) return std::move(*failure);

  GridFunction u = std::move(std::get<StateSolution>(state).u);
  PdeJacobian j = jacobian_at(p, x, u);
  std::optional<TridiagonalFactor> factor;
  try {
    factor.emplace(j.factor());
  } catch (const SingularOperator&) {
    // left empty; derivative actions report the singularity
  }
  return ReducedEval{x, std::move(u), std::move(j), std::move(factor)};
}

namespace {
const TridiagonalFactor& require_factor(const ReducedEval& e) {
  if (!e.factor) throw SingularOperator("reduced map: A_u is singular at the current state");
  return *e.factor;
}
}  // namespace

GridFunction reduced_derivative_apply(const ReducedEval& e, const GridFunction& dx) {
  require_same_grid(e.x, dx, "reduced_derivative_apply");
  return GridFunction(dx.grid(), require_factor(e).solve(dx.values()));
}

GridFunction reduced_adjoint_apply(const ReducedEval& e, const GridFunction& r) {
  require_same_grid(e.x, r, "reduced_adjoint_apply");
  // symmetric K: the transpose solve reuses the same factorization
  return GridFunction(r.grid(), require_factor(e).solve(r.values()));
}

double operator_norm_estimate(const LinearMap& apply, const LinearMap& adjoint, Eigen::Index dim,
                              std::size_t iterations, std::uint64_t seed, const InnerProduct& domain_inner) {
  if (iterations < 1) throw std::invalid_argument("operator_norm_estimate: need at least one iteration");
  if (dim < 1) throw std::invalid_argument("operator_norm_estimate: empty domain");
  const InnerProduct ip =
      domain_inner ? domain_inner : InnerProduct([](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return a.dot(b);
      });

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = gauss(rng);
  v /= std::sqrt(ip(v, v));

  double best = 0.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    Eigen::VectorXd w = adjoint(apply(v));
    const double rayleigh = ip(v, w);
    if (rayleigh > best) best = rayleigh;
    const double wn = std::sqrt(ip(w, w));
    if (!(wn > 0.0)) break;
    v = w / wn;
  }
  return std::sqrt(best);
}

}  // namespace aaoreg
