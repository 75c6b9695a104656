#pragma once

#include "carnot/group.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace carnot {

/// Truncated uniform grid over R^d: axis m has n_m (odd) points spanning
/// [-R_m, R_m], so the group identity 0 is a grid point. Flat storage is
/// row-major with the last axis fastest. Values outside the box are zero.
class Grid {
 public:
  static constexpr std::size_t default_max_points = std::size_t{1} << 25;

  Grid(StrataShape shape, std::vector<double> half_widths, std::vector<int> points,
       std::size_t max_points = default_max_points);
  /// Same half-width and point count on every axis.
  static std::shared_ptr<const Grid> uniform(const StrataShape& shape, double half_width, int points,
                                             std::size_t max_points = default_max_points);

  const StrataShape& shape() const { return shape_; }
  int dimension() const { return static_cast<int>(points_.size()); }
  std::size_t size() const { return size_; }
  int points(std::size_t m) const { return points_[m]; }
  const std::vector<int>& points() const { return points_; }
  double half_width(std::size_t m) const { return half_widths_[m]; }
  double spacing(std::size_t m) const { return spacing_[m]; }
  double min_spacing() const;
  double cell_volume() const { return cell_volume_; }
  std::size_t stride(std::size_t m) const { return strides_[m]; }
  /// Flat index of the origin.
  std::size_t center() const;

  double coordinate(std::size_t m, int i) const { return -half_widths_[m] + i * spacing_[m]; }
  void multi_index(std::size_t flat, std::span<int> out) const;
  std::size_t flat_index(std::span<const int> index) const;
  void coordinates(std::size_t flat, std::span<double> out) const;
  std::vector<double> coordinates(std::size_t flat) const;

  /// Largest r with the homogeneous ball B(0, r) inside the box.
  double inscribed_radius() const;

  std::string axes_text() const;
  std::string spacing_text() const;

 private:
  StrataShape shape_;
  std::vector<double> half_widths_;
  std::vector<int> points_;
  std::vector<double> spacing_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
  double cell_volume_ = 1.0;
};

using GridPtr = std::shared_ptr<const Grid>;

class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(GridPtr grid, double fill = 0.0);
  GridFunction(GridPtr grid, std::vector<double> values);

  /// Samples f at every grid point.
  static GridFunction sample(GridPtr grid, const std::function<double(std::span<const double>)>& f);
  /// Discrete delta of unit mass at the origin.
  static GridFunction delta(GridPtr grid);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(double c);
  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(double c, GridFunction a) { return a *= c; }
  /// this += c * other
  void axpy(double c, const GridFunction& other);

  bool all_finite() const;
  double max_abs() const;
  double min() const;
  double max() const;

 private:
  void check_compatible(const GridFunction& other) const;

  GridPtr grid_;
  std::vector<double> values_;
};

/// Riemann-sum L^p norm; p = infinity gives max |u|. Throws for p <= 0.
double lp_norm(const GridFunction& u, double p);
/// Riemann-sum integral.
double integral(const GridFunction& u);
/// Integral over points lying in the outer shell (|x_m| > (1 - margin) R_m
/// on some axis).
double shell_integral(const GridFunction& u, double margin = 0.1);

/// Multilinear interpolation; zero outside the box.
double interpolate(const GridFunction& u, std::span<const double> x);

/// Homogeneous norm of every grid point.
std::vector<double> grid_hom_norms(const Grid& grid);

/// Writes "# group,N,axes,h" then one row "i_1,...,i_d,x_1,...,x_d,value"
/// per point.
void write_csv(std::ostream& out, const GridFunction& u, const std::string& group_name);

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

}  // namespace carnot
