#pragma once

#include "carnot/field_calculus.hpp"
#include "carnot/grid.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace carnot {

enum class Difference { centered, forward, backward };

/// Compressed sparse rows, double values.
struct CsrMatrix {
  std::size_t rows = 0;
  std::vector<std::int64_t> row_ptr;
  std::vector<std::int32_t> col;
  std::vector<double> val;

  std::size_t nonzeros() const { return val.size(); }
  /// out = A u, rows split across OpenMP threads.
  void multiply(std::span<const double> u, std::span<double> out) const;
  void multiply_serial(std::span<const double> u, std::span<double> out) const;
  /// max |A_ij - A_ji|
  double asymmetry() const;
};

/// A VectorField on a grid: sum_m c_m(x) D_m with pointwise-evaluated
/// coefficients and one-dimensional differences, zero outside the box.
class DiscreteField {
 public:
  DiscreteField(const VectorField& field, GridPtr grid, Difference kind = Difference::centered);

  const Grid& grid() const { return *grid_; }
  Difference kind() const { return kind_; }

  void apply(std::span<const double> u, std::span<double> out) const;
  void apply_serial(std::span<const double> u, std::span<double> out) const;
  GridFunction apply(const GridFunction& u) const;

  /// max over the grid of sum_m |c_m(x)|.
  double coefficient_bound() const { return coefficient_bound_; }
  /// True when no coefficient c_m depends on x_m.
  bool transverse() const { return transverse_; }

  CsrMatrix matrix() const;

 private:
  struct Axis {
    std::size_t m = 0;
    bool constant = true;
    double value = 0.0;
    std::vector<double> values;
    double at(std::size_t p) const { return constant ? value : values[p]; }
  };
  double point_value(std::span<const double> u, std::size_t p) const;

  GridPtr grid_;
  Difference kind_;
  std::vector<Axis> axes_;
  double coefficient_bound_ = 0.0;
  bool transverse_ = true;
};

/// L_h = -1/2 sum_i (X_i^+ X_i^- + X_i^- X_i^+) with one-sided differences
/// X^+ (forward) and X^- (backward). Applied either as a fused sparse matrix
/// or by composing the field stencils.
class DiscreteSublaplacian {
 public:
  DiscreteSublaplacian(const std::vector<VectorField>& generators, GridPtr grid);
  DiscreteSublaplacian(const GroupSpec& g, GridPtr grid);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }

  /// Fused sparse product, OpenMP over rows.
  void apply(std::span<const double> u, std::span<double> out) const;
  GridFunction apply(const GridFunction& u) const;
  /// Stencil composition with OpenMP kernels.
  void apply_composed(std::span<const double> u, std::span<double> out) const;
  /// Single-threaded stencil composition, the reference path.
  void apply_serial(std::span<const double> u, std::span<double> out) const;

  /// A = max_x (sum_i sum_m |c_{i,m}(x)|)^2.
  double cfl_constant() const { return cfl_constant_; }
  /// Largest stable-by-construction step for the given safety factor.
  double time_step(double safety) const;
  /// Holds when every generator is transverse, which makes L_h symmetric.
  bool symmetric() const { return symmetric_; }
  const CsrMatrix& matrix() const { return matrix_; }

 private:
  GridPtr grid_;
  std::vector<DiscreteField> forward_;
  std::vector<DiscreteField> backward_;
  CsrMatrix matrix_;
  double cfl_constant_ = 0.0;
  bool symmetric_ = true;
};

DiscreteField discretize(const VectorField& field, GridPtr grid);
DiscreteSublaplacian discretize(const SublaplacianSymbol& symbol, GridPtr grid);

}  // namespace carnot
