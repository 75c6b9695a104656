#pragma once

#include "carnot/grid.hpp"

#include <functional>
#include <vector>

namespace carnot {

/// Dyadic maximal function: for every x the largest average of |u| over
/// the balls {y : |y^{-1} x|_G <= r}, r in {0} u {h_min 2^k} up to the box
/// diameter. Ball volumes are point counts. Cost is quadratic in the grid
/// size, so only small grids are sensible.
GridFunction maximal(const GroupSpec& g, const GridFunction& u);

/// Radii used by maximal(), excluding the zero radius.
std::vector<double> maximal_radii(const GroupSpec& g, const Grid& grid);

using RadialProfile = std::function<double(double)>;

struct RadialCheck {
  double grid_ratio = 0.0;    // I1 / I2
  double radial_ratio = 0.0;  // J1 / J2
  double discrepancy = 0.0;   // |grid_ratio - radial_ratio|
};

/// Compares grid integrals of v_k(|x|_G) with the one-dimensional integrals
/// J_k = int_0^inf v_k(r) r^{N-1} dr. Throws std::domain_error if I2 or J2
/// vanishes.
RadialCheck radial_integration_check(const GroupSpec& g, const Grid& grid, const RadialProfile& v1,
                                     const RadialProfile& v2);

/// J = int_0^inf v(r) r^{N-1} dr.
double radial_moment(const RadialProfile& v, int homogeneous_dimension);

struct HaarScalingCheck {
  double scaled = 0.0;    // grid integral of f(delta_lambda x)
  double expected = 0.0;  // lambda^{-N} grid integral of f
  double relative_error = 0.0;
};

HaarScalingCheck haar_scaling_check(const GroupSpec& g, GridPtr grid,
                                    const std::function<double(std::span<const double>)>& f, double lambda);

}  // namespace carnot
