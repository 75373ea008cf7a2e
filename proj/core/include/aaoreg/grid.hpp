#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace aaoreg {

/// Thrown when two grid objects of different resolution are combined.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform grid on (0,1) with homogeneous Dirichlet ends. Only interior nodes
/// s_i = (i+1) h, i = 0..n-1, carry unknowns.
class Grid1D {
 public:
  explicit Grid1D(std::size_t n_interior);

  /// Grid whose spacing is 1/cells, i.e. cells-1 interior nodes.
  static Grid1D with_cells(std::size_t cells) { return Grid1D(cells - 1); }

  std::size_t size() const noexcept { return n_; }
  double h() const noexcept { return h_; }
  double node(std::size_t i) const noexcept { return static_cast<double>(i + 1) * h_; }

  friend bool operator==(const Grid1D& a, const Grid1D& b) noexcept { return a.n_ == b.n_; }

 private:
  std::size_t n_;
  double h_;
};

/// Nodal values on the interior of a Grid1D with the h-weighted L2 inner
/// product <f,g> = h sum f_i g_i.
class GridFunction {
 public:
  explicit GridFunction(const Grid1D& grid);
  GridFunction(const Grid1D& grid, Eigen::VectorXd values);

  static GridFunction zeros(const Grid1D& grid) { return GridFunction(grid); }
  static GridFunction constant(const Grid1D& grid, double value);
  static GridFunction sample(const Grid1D& grid, const std::function<double(double)>& f);

  const Grid1D& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.size(); }
  double h() const noexcept { return grid_.h(); }

  const Eigen::VectorXd& values() const noexcept { return values_; }
  Eigen::VectorXd& values() noexcept { return values_; }

  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  double& operator[](std::size_t i) { return values_[static_cast<Eigen::Index>(i)]; }

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(double factor);

  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(GridFunction a, double c) { return a *= c; }
  friend GridFunction operator*(double c, GridFunction a) { return a *= c; }
  friend GridFunction operator-(GridFunction a) { return a *= -1.0; }

 private:
  Grid1D grid_;
  Eigen::VectorXd values_;
};

/// Throws DimensionError unless both live on the same grid.
void require_same_grid(const GridFunction& a, const GridFunction& b, const char* where);

double inner(const GridFunction& a, const GridFunction& b);
double norm(const GridFunction& f);
double max_abs(const GridFunction& f);

/// Nodewise product a_i * b_i.
GridFunction hadamard(const GridFunction& a, const GridFunction& b);

}  // namespace aaoreg
