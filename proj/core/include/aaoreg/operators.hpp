#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>

#include "aaoreg/pde.hpp"

namespace aaoreg {

/// Joint unknown (x, u) with <(x1,u1),(x2,u2)> = <x1,x2> + <u1,u2>.
struct AaoPoint {
  GridFunction x;
  GridFunction u;

  static AaoPoint zeros(const Grid1D& grid) { return AaoPoint{GridFunction(grid), GridFunction(grid)}; }

  /// Stacked coefficient vector [x; u] and its inverse.
  Eigen::VectorXd stacked() const;
  static AaoPoint unstack(const Grid1D& grid, const Eigen::VectorXd& v);

  AaoPoint& operator+=(const AaoPoint& o);
  AaoPoint& operator-=(const AaoPoint& o);
  AaoPoint& operator*=(double c);
  friend AaoPoint operator+(AaoPoint a, const AaoPoint& b) { return a += b; }
  friend AaoPoint operator-(AaoPoint a, const AaoPoint& b) { return a -= b; }
  friend AaoPoint operator*(double c, AaoPoint a) { return a *= c; }
};

/// Image of the joint map: model block and observation block.
struct AaoImage {
  GridFunction model;
  GridFunction obs;
};

double inner(const AaoPoint& a, const AaoPoint& b);
double norm(const AaoPoint& a);
double inner(const AaoImage& a, const AaoImage& b);
double norm(const AaoImage& a);

/// Right side of the joint system, (y_mod, y_obs), with noise level and
/// model-block weight. Misfit: (rho/2)||A - y_mod||^2 + (1/2)||u - y_obs||^2.
struct DataPair {
  GridFunction y_mod;
  GridFunction y_obs;
  double delta = 0.0;
  double rho = 1.0;

  static DataPair observed(const GridFunction& y_obs, double delta, double rho = 1.0) {
    return DataPair{GridFunction(y_obs.grid()), y_obs, delta, rho};
  }
};

/// Norm used for the state component where the method needs a Riesz map.
/// h2 is the graph norm ||v||_V = ||Δ_h v|| of H^2 ∩ H^1_0.
enum class StateNorm { l2, h2 };

/// Gram operator M of the chosen state norm (<a,b>_V = <a, M b>) and its
/// inverse, the Riesz map turning an L2 gradient into a V gradient. For h2,
/// M = Δ_h^2 and M^-1 is applied in the sine basis, without any solve.
class StateRiesz {
 public:
  StateRiesz(const Grid1D& grid, StateNorm kind);

  StateNorm kind() const noexcept { return kind_; }
  GridFunction gram_apply(const GridFunction& v) const;
  GridFunction riesz_apply(const GridFunction& g) const;
  double inner(const GridFunction& a, const GridFunction& b) const;

 private:
  Grid1D grid_;
  StateNorm kind_;
  std::optional<DirichletSpectrum> spectrum_;
  Eigen::VectorXd inverse_weights_;
};

/// (x, u) -> (A(x,u), u).
AaoImage aao_apply(const ProblemInstance& p, const AaoPoint& z);

/// (dx, du) -> (-dx + K du, du) with K at z.
AaoImage aao_jacobian_apply(const ProblemInstance& p, const AaoPoint& z, const AaoPoint& d);

/// (w1, w2) -> (-w1, K w1 + w2), the L2 adjoint of aao_jacobian_apply.
AaoPoint aao_jacobian_adjoint_apply(const ProblemInstance& p, const AaoPoint& z, const AaoImage& w);

struct StateSolveOptions {
  double tol = 1e-10;
  std::size_t max_newton = 100;
};

/// Snapshot of the reduced map at x: state u = S(x) and the factored K there.
struct ReducedEval {
  GridFunction x;
  GridFunction u;
  PdeJacobian jacobian;
  std::optional<TridiagonalFactor> factor;  // empty when K is singular at u

  const GridFunction& value() const noexcept { return u; }
};

using ReducedResult = std::variant<ReducedEval, NonconvergenceReport>;

/// Evaluates F(x) = S(x) by a state solve started at warm_start (zero if null).
ReducedResult reduced_eval(const ProblemInstance& p, const GridFunction& x, const StateSolveOptions& opts = {},
                           const GridFunction* warm_start = nullptr);

/// F'(x) dx = K^-1 dx.
GridFunction reduced_derivative_apply(const ReducedEval& e, const GridFunction& dx);

/// F'(x)* r = K^-T r.
GridFunction reduced_adjoint_apply(const ReducedEval& e, const GridFunction& r);

using LinearMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using InnerProduct = std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

/// Power iteration on adjoint∘apply from a seeded random start; returns the
/// square root of the largest Rayleigh quotient seen. If the domain carries a
/// non-Euclidean inner product, pass it together with the matching adjoint.
double operator_norm_estimate(const LinearMap& apply, const LinearMap& adjoint, Eigen::Index dim,
                              std::size_t iterations, std::uint64_t seed = 1, const InnerProduct& domain_inner = {});

}  // namespace aaoreg
