#include "carnot/grid_analysis.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace carnot {

std::vector<double> maximal_radii(const GroupSpec& g, const Grid& grid) {
  std::vector<double> corner(static_cast<std::size_t>(grid.dimension()));
  for (std::size_t m = 0; m < corner.size(); ++m) corner[m] = 2.0 * grid.half_width(m);
  // Group translation distorts distances, so allow a generous diameter.
  const double diameter = 2.0 * hom_norm(g.shape(), corner);
  std::vector<double> radii;
  for (double r = grid.min_spacing(); r <= 2.0 * diameter; r *= 2.0) radii.push_back(r);
  return radii;
}

GridFunction maximal(const GroupSpec& g, const GridFunction& u) {
  const auto& grid = u.grid();
  if (!(g.shape() == grid.shape())) throw std::invalid_argument("maximal: grid shape differs from the group");
  const std::size_t n = grid.size();
  const auto radii = maximal_radii(g, grid);
  const std::size_t buckets = radii.size() + 1;

  std::vector<Point<double>> points(n), inverses(n);
  std::vector<double> magnitude(n);
  for (std::size_t p = 0; p < n; ++p) {
    points[p] = grid.coordinates(p);
    inverses[p] = inverse(g, points[p]);
    magnitude[p] = std::abs(u[p]);
  }

  GridFunction out(u.grid_ptr());
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel
  {
    std::vector<double> sum(buckets), num(buckets);
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t sx = 0; sx < count; ++sx) {
      const auto x = static_cast<std::size_t>(sx);
      std::fill(sum.begin(), sum.end(), 0.0);
      std::fill(num.begin(), num.end(), 0.0);
      for (std::size_t y = 0; y < n; ++y) {
        std::size_t k = 0;
        if (y != x) {
          const double dist = hom_norm(g.shape(), compose(g, inverses[y], points[x]));
          auto it = std::lower_bound(radii.begin(), radii.end(), dist);
          if (it == radii.end()) continue;
          k = 1 + static_cast<std::size_t>(it - radii.begin());
        }
        sum[k] += magnitude[y];
        num[k] += 1.0;
      }
      double best = 0.0, s = 0.0, c = 0.0;
      for (std::size_t k = 0; k < buckets; ++k) {
        s += sum[k];
        c += num[k];
        if (c > 0.0) best = std::max(best, s / c);
      }
      out[x] = best;
    }
  }
  return out;
}

double radial_moment(const RadialProfile& v, int homogeneous_dimension) {
  boost::math::quadrature::exp_sinh<double> integrator;
  const int power = homogeneous_dimension - 1;
  auto integrand = [&](double r) {
    const double value = v(r);
    return value == 0.0 ? 0.0 : value * std::pow(r, power);
  };
  return integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity());
}

RadialCheck radial_integration_check(const GroupSpec& g, const Grid& grid, const RadialProfile& v1,
                                     const RadialProfile& v2) {
  const auto norms = grid_hom_norms(grid);
  double i1 = 0.0, i2 = 0.0;
  for (double r : norms) {
    i1 += v1(r);
    i2 += v2(r);
  }
  i1 *= grid.cell_volume();
  i2 *= grid.cell_volume();
  const double j1 = radial_moment(v1, g.homogeneous_dimension());
  const double j2 = radial_moment(v2, g.homogeneous_dimension());
  if (i2 == 0.0 || j2 == 0.0) throw std::domain_error("radial integration check: second profile integrates to zero");
  RadialCheck check;
  check.grid_ratio = i1 / i2;
  check.radial_ratio = j1 / j2;
  check.discrepancy = std::abs(check.grid_ratio - check.radial_ratio);
  return check;
}

HaarScalingCheck haar_scaling_check(const GroupSpec& g, GridPtr grid,
                                    const std::function<double(std::span<const double>)>& f, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("haar scaling check: lambda must be positive");
  const auto base = GridFunction::sample(grid, f);
  const auto scaled = GridFunction::sample(grid, [&](std::span<const double> x) {
    Point<double> p(x.begin(), x.end());
    return f(dilate(g, lambda, p));
  });
  HaarScalingCheck check;
  check.scaled = integral(scaled);
  check.expected = std::pow(lambda, -g.homogeneous_dimension()) * integral(base);
  check.relative_error = std::abs(check.scaled - check.expected) / std::abs(check.expected);
  return check;
}

}  // namespace carnot
