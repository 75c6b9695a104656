#include "carnot/heat.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

using namespace carnot;

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();

double gaussian_1d(double x, double variance) {
  return std::exp(-x * x / (2.0 * variance)) / std::sqrt(2.0 * std::numbers::pi * variance);
}

GridFunction bump(GridPtr grid, const GroupSpec& g, double scale) {
  return GridFunction::sample(grid, [&](std::span<const double> x) {
    const double r = hom_norm(g.shape(), x) / scale;
    return std::exp(-r * r * r * r);
  });
}
}  // namespace

TEST_CASE("t = 0 returns the initial data") {
  auto g = builtin_group("heisenberg");
  HeatPropagator heat(g, Grid::uniform(g.shape(), 3.0, 13));
  auto u0 = bump(heat.op().grid_ptr(), g, 1.0);
  auto u = heat.evolve(u0, 0.0);
  CHECK(lp_norm(u - u0, inf) == 0.0);
}

TEST_CASE("Euclidean line: Gaussian variance grows by 2t") {
  auto g = builtin_group("euclidean(1)");
  auto grid = Grid::uniform(g.shape(), 10.0, 401);
  HeatPropagator heat(g, grid);
  auto u0 = GridFunction::sample(grid, [](std::span<const double> x) { return gaussian_1d(x[0], 0.5); });
  auto u = heat.evolve(u0, 0.5);
  auto exact = GridFunction::sample(grid, [](std::span<const double> x) { return gaussian_1d(x[0], 1.5); });
  CHECK(lp_norm(u - exact, inf) < 1e-3);
  CHECK(integral(u) == doctest::Approx(integral(u0)).epsilon(1e-6));
}

TEST_CASE("explicit Euler option") {
  auto g = builtin_group("euclidean(1)");
  auto grid = Grid::uniform(g.shape(), 10.0, 201);
  PropagatorConfig cfg;
  cfg.integrator = Integrator::euler;
  HeatPropagator heat(g, grid, cfg);
  auto u0 = GridFunction::sample(grid, [](std::span<const double> x) { return gaussian_1d(x[0], 0.5); });
  auto u = heat.evolve(u0, 0.5);
  auto exact = GridFunction::sample(grid, [](std::span<const double> x) { return gaussian_1d(x[0], 1.5); });
  CHECK(lp_norm(u - exact, inf) < 2e-3);
}

TEST_CASE("mass, semigroup, contraction and positivity on Heisenberg") {
  auto g = builtin_group("heisenberg");
  auto grid = Grid::uniform(g.shape(), 4.0, 25);
  HeatPropagator heat(g, grid);
  auto u0 = bump(grid, g, 1.0);
  const double mass0 = integral(u0);
  auto both = heat.evolve_to(u0, {0.05, 0.15});
  CHECK(integral(both[1]) == doctest::Approx(mass0).epsilon(1e-6));

  auto two_legs = heat.evolve(heat.evolve(u0, 0.05), 0.1);
  CHECK(lp_norm(two_legs - both[1], 2.0) <= 1e-6 * lp_norm(both[1], 2.0));

  for (double p : {2.0, 4.0, inf}) {
    for (const auto& u : both) CHECK(lp_norm(u, p) <= lp_norm(u0, p) * (1.0 + 1e-6));
  }
  // The mixed stencil terms allow a tiny undershoot at short times.
  for (const auto& u : both) CHECK(u.min() >= -1e-5 * u.max());
  for (const auto& u : heat.evolve_to(u0, {0.5, 1.0})) CHECK(u.min() >= -1e-8 * u.max());
}

TEST_CASE("step policy and faults") {
  auto g = builtin_group("heisenberg");
  auto grid = Grid::uniform(g.shape(), 2.0, 9);
  HeatPropagator base(g, grid);
  PropagatorConfig too_big;
  too_big.dt = 2.0 * base.policy_dt();
  CHECK_THROWS_AS(HeatPropagator(g, grid, too_big), std::invalid_argument);
  PropagatorConfig smaller;
  smaller.dt = 0.5 * base.policy_dt();
  CHECK(HeatPropagator(g, grid, smaller).dt() == doctest::Approx(0.5 * base.policy_dt()));

  GridFunction bad(grid, 0.0);
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(base.evolve(bad, 0.01), NumericalFault);
  CHECK_THROWS_AS(base.evolve_to(GridFunction(grid), {0.2, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(kernel_probe(g, grid, {base.dt()}), std::invalid_argument);
}

TEST_CASE("metrics csv") {
  std::ostringstream out;
  write_metrics_csv(out, {{0.0, 1.0, 2.0, 3.0, 0.0}});
  CHECK(out.str() == "t,mass,linf,l2,shell_mass\n0,1,2,3,0\n");
}

TEST_CASE("Euclidean plane kernel matches the Gaussian") {
  auto g = builtin_group("euclidean(2)");
  auto grid = Grid::uniform(g.shape(), 4.0, 121);
  auto probe = kernel_probe(g, grid, {0.1, 0.25, 0.5});
  for (const auto& snap : probe.snapshots) {
    const double t = snap.t;
    const auto mask = bulk_mask(snap.h);
    double worst = 0.0, top = 0.0;
    for (std::size_t p = 0; p < grid->size(); ++p) {
      if (!mask[p]) continue;
      auto x = grid->coordinates(p);
      const double exact = std::exp(-(x[0] * x[0] + x[1] * x[1]) / (4.0 * t)) / (4.0 * std::numbers::pi * t);
      worst = std::max(worst, std::abs(snap.h[p] - exact));
      top = std::max(top, exact);
    }
    CHECK(worst / top < 0.02);
  }
  CHECK(symmetry_error(g, probe.snapshots[1].h) < 1e-12);
}

TEST_CASE("Gaussian bound diagnostic") {
  SUBCASE("line recovers b = 1/4") {
    auto g = builtin_group("euclidean(1)");
    auto grid = Grid::uniform(g.shape(), 8.0, 321);
    auto probe = kernel_probe(g, grid, {0.25, 0.5, 1.0});
    auto fit = gaussian_bound_diagnostic(g, probe);
    CHECK(fit.b == doctest::Approx(0.25).epsilon(0.1));
    CHECK(fit.pass);
  }
  SUBCASE("noise only") {
    auto g = builtin_group("euclidean(1)");
    auto grid = Grid::uniform(g.shape(), 8.0, 21);
    KernelProbe probe;
    probe.homogeneous_dimension = 1;
    GridFunction noise(grid, 0.0);
    for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = 1e-12 * static_cast<double>(i % 3);
    probe.snapshots.push_back({0.5, noise});
    CHECK_THROWS_WITH_AS(gaussian_bound_diagnostic(g, probe), "gaussian bound diagnostic: insufficient samples",
                         std::domain_error);
  }
}

TEST_CASE("smoothing rate on the plane") {
  auto g = builtin_group("euclidean(2)");
  auto grid = Grid::uniform(g.shape(), 6.0, 121);
  auto probe = kernel_probe(g, grid, {0.1, 0.2, 0.4, 0.8});
  CHECK(smoothing_rate(probe, 2.0).slope == doctest::Approx(-0.5).epsilon(0.1));
  CHECK(smoothing_rate(probe, inf).slope == doctest::Approx(-1.0).epsilon(0.1));
  CHECK(expected_smoothing_slope(4, inf) == -2.0);
  KernelProbe short_probe = probe;
  short_probe.snapshots.pop_back();
  CHECK_THROWS_AS(smoothing_rate(short_probe, 2.0), std::invalid_argument);
}

TEST_CASE("smoothing inequality family") {
  auto g = builtin_group("euclidean(1)");
  HeatPropagator heat(g, Grid::uniform(g.shape(), 12.0, 241));
  auto phi = [](std::span<const double> x) { return std::exp(-x[0] * x[0]); };
  auto same = smoothing_inequality_check(g, heat, 2.0, 2.0, {0.5, 1.0, 2.0}, {0.1, 0.3}, phi);
  CHECK(same.max_constant <= 1.0 + 1e-6);
  auto single = smoothing_inequality_check(g, heat, 1.0, 4.0, {1.0}, {0.2}, phi);
  CHECK(std::isfinite(single.max_constant));
  CHECK(single.spread == 1.0);
}

TEST_CASE("kernel laws on the line and probe windows") {
  auto g = builtin_group("euclidean(1)");
  auto grid = Grid::uniform(g.shape(), 20.0, 401);
  auto probe = kernel_probe(g, grid, {0.5, 1.0, 2.0, 4.0});
  auto laws = kernel_laws(g, probe);
  CHECK(laws.pass());
  CHECK(laws.times.size() == 4);
  REQUIRE(laws.pairs.size() == 2);
  CHECK(laws.pairs[0].early == 0.5);
  CHECK(laws.pairs[1].early == 1.0);
  CHECK(laws.pairs[1].late == 4.0);
  CHECK(laws.scaling_max < 0.01);
  CHECK(laws.symmetry_max < 1e-12);

  auto window = probe_window(probe, 0.75, 2.0);
  REQUIRE(window.snapshots.size() == 2);
  CHECK(window.snapshots.front().t == 1.0);
  CHECK(window.snapshots.back().t == 2.0);
  CHECK(window.homogeneous_dimension == 1);
  CHECK_THROWS(kernel_laws(g, window));
}
