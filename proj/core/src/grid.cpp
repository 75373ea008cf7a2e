#include "aaoreg/grid.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace aaoreg {

Grid1D::Grid1D(std::size_t n_interior) : n_(n_interior), h_(1.0 / static_cast<double>(n_interior + 1)) {
  if (n_interior < 2) {
    throw std::invalid_argument("Grid1D: need at least 2 interior nodes, got " + std::to_string(n_interior));
  }
}

GridFunction::GridFunction(const Grid1D& grid)
    : grid_(grid), values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()))) {}

GridFunction::GridFunction(const Grid1D& grid, Eigen::VectorXd values) : grid_(grid), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != grid_.size()) {
    throw DimensionError("GridFunction: " + std::to_string(values_.size()) + " values for a grid with " +
                         std::to_string(grid_.size()) + " interior nodes");
  }
}

GridFunction GridFunction::constant(const Grid1D& grid, double value) {
  return GridFunction(grid, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.size()), value));
}

GridFunction GridFunction::sample(const Grid1D& grid, const std::function<double(double)>& f) {
  GridFunction out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = f(grid.node(i));
  return out;
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require_same_grid(*this, other, "operator+=");
  values_ += other.values_;
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  require_same_grid(*this, other, "operator-=");
  values_ -= other.values_;
  return *this;
}

GridFunction& GridFunction::operator*=(double factor) {
  values_ *= factor;
  return *this;
}

void require_same_grid(const GridFunction& a, const GridFunction& b, const char* where) {
  if (!(a.grid() == b.grid())) {
    throw DimensionError(std::string(where) + ": grid mismatch (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + " nodes)");
  }
}

double inner(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a, b, "inner");
  return a.h() * a.values().dot(b.values());
}

double norm(const GridFunction& f) { return std::sqrt(inner(f, f)); }

double max_abs(const GridFunction& f) { return f.values().cwiseAbs().maxCoeff(); }

GridFunction hadamard(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a, b, "hadamard");
  return GridFunction(a.grid(), a.values().cwiseProduct(b.values()));
}

}  // namespace aaoreg
