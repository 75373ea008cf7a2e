#include "aaoreg/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "aaoreg/solvers.hpp"

namespace aaoreg {

namespace {

struct Sampler {
  std::mt19937_64 rng;
  std::normal_distribution<double> gauss{0.0, 1.0};

  GridFunction field(const Grid1D& g, double scale = 1.0) {
    GridFunction f(g);
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = scale * gauss(rng);
    return f;
  }
};

SelftestCheck check(std::string name, double worst, double tol) {
  return SelftestCheck{std::move(name), worst <= tol, fmt::format("worst {:.3e} (tol {:.0e})", worst, tol)};
}

}  // namespace

std::vector<SelftestCheck> run_selftest(std::uint64_t seed) {
  std::vector<SelftestCheck> out;
  Sampler rnd{std::mt19937_64(seed)};
  const Grid1D grid(99);
  const ProblemInstance p = ProblemInstance::model(grid, 10.0);

  {
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const AaoPoint z{rnd.field(grid), rnd.field(grid, 0.5)};
      const AaoPoint d{rnd.field(grid), rnd.field(grid)};
      const AaoImage w{rnd.field(grid), rnd.field(grid)};
      const double lhs = inner(aao_jacobian_apply(p, z, d), w);
      const double rhs = inner(d, aao_jacobian_adjoint_apply(p, z, w));
      worst = std::max(worst, std::abs(lhs - rhs) / (norm(d) * norm(w)));
    }
    out.push_back(check("adjoint identity, joint map", worst, 1e-10));
  }

  {
    double worst = 0.0;
    const auto e = std::get<ReducedEval>(reduced_eval(p, rnd.field(grid, 5.0)));
    for (int t = 0; t < 100; ++t) {
      const GridFunction dx = rnd.field(grid);
      const GridFunction r = rnd.field(grid);
      const double lhs = inner(reduced_derivative_apply(e, dx), r);
      const double rhs = inner(dx, reduced_adjoint_apply(e, r));
      worst = std::max(worst, std::abs(lhs - rhs) / (norm(dx) * norm(r)));
    }
    out.push_back(check("adjoint identity, reduced map", worst, 1e-10));
  }

  {
    const double eps = 1e-7;
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const GridFunction x = rnd.field(grid);
      const GridFunction u = rnd.field(grid, 0.5);
      const GridFunction v = rnd.field(grid);
      const GridFunction fd = (1.0 / eps) * (residual_A(p, x, u + eps * v) - residual_A(p, x, u));
      const GridFunction exact = jacobian_at(p, x, u).apply_k(v);
      worst = std::max(worst, norm(fd - exact) / norm(exact));
    }
    out.push_back(check("model Jacobian vs finite differences", worst, 1e-5));
  }

  {
    const double eps = 1e-7;
    const GridFunction x = rnd.field(grid, 5.0);
    const GridFunction y = rnd.field(grid, 0.1);
    const auto value = [&](const GridFunction& xx) {
      const auto e = std::get<ReducedEval>(reduced_eval(p, xx));
      const GridFunction r = e.u - y;
      return 0.5 * inner(r, r);
    };
    const auto e = std::get<ReducedEval>(reduced_eval(p, x));
    const GridFunction grad = reduced_adjoint_apply(e, e.u - y);
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
      const GridFunction dx = rnd.field(grid);
      const double fd = (value(x + eps * dx) - value(x - eps * dx)) / (2.0 * eps);
      const double exact = inner(grad, dx);
      worst = std::max(worst, std::abs(fd - exact) / std::max(std::abs(exact), 1e-300));
    }
    out.push_back(check("reduced gradient vs finite differences", worst, 1e-5));
  }

  {
    const ProblemInstance lin = ProblemInstance::model(grid, 0.0);
    const GridFunction u = GridFunction::sample(grid, [](double s) { return s * (1.0 - s); });
    const double worst = max_abs(residual_A(lin, GridFunction::constant(grid, 2.0), u));
    out.push_back(check("stencil exact on quadratics", worst, 1e-9));
  }

  {
    double worst = 0.0;
    const PdeJacobian j = jacobian_at(p, rnd.field(grid), rnd.field(grid));
    for (int t = 0; t < 20; ++t) {
      const GridFunction a = rnd.field(grid);
      const GridFunction b = rnd.field(grid);
      const double lhs = inner(j.apply_k(a), b);
      worst = std::max(worst, std::abs(lhs - inner(a, j.apply_k(b))) / std::max(1.0, std::abs(lhs)));
    }
    out.push_back(check("model Jacobian symmetric", worst, 1e-12));
  }

  {
    const DataPair d = DataPair::observed(rnd.field(grid, 0.1), 0.01);
    const StateRiesz riesz(grid, StateNorm::h2);
    AaoPoint z = AaoPoint::zeros(grid);
    reset_solve_stats();
    for (int k = 0; k < 50; ++k) z = landweber_aao_step(p, z, d, 0.1, riesz);
    const auto solves = static_cast<double>(solve_stats().linear_solves + solve_stats().state_solves);
    out.push_back(check("all-at-once Landweber performs no solves", solves, 0.0));
  }

  return out;
}

}  // namespace aaoreg
