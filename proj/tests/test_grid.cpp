#include "carnot/grid.hpp"
#include "carnot/grid_analysis.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace carnot;

TEST_CASE("grid geometry") {
  auto g = Grid::uniform(StrataShape({2, 1}), 6.0, 65);
  CHECK(g->size() == 65u * 65u * 65u);
  CHECK(g->spacing(0) == doctest::Approx(0.1875));
  CHECK(g->coordinate(2, 32) == 0.0);
  auto x = g->coordinates(g->center());
  CHECK(x == std::vector<double>{0.0, 0.0, 0.0});
  std::vector<int> idx(3);
  g->multi_index(g->stride(0) * 3 + 7, idx);
  CHECK(idx == std::vector<int>{3, 0, 7});
  CHECK(g->flat_index(idx) == g->stride(0) * 3 + 7);
  CHECK(g->inscribed_radius() == doctest::Approx(std::sqrt(6.0)));
  CHECK_THROWS_AS(Grid(StrataShape({1}), {1.0}, {4}), std::invalid_argument);
  CHECK_THROWS_AS(Grid(StrataShape({1}), {1.0}, {3}), std::invalid_argument);
  CHECK_THROWS_AS(Grid(StrataShape({3}), {1.0, 1.0, 1.0}, {101, 101, 101}, 1000), std::length_error);
}

TEST_CASE("lp norms") {
  auto line = Grid::uniform(StrataShape({1}), 1.0, 201);
  GridFunction one(line, 1.0);
  CHECK(lp_norm(one, 1.0) == doctest::Approx(2.0).epsilon(0.02));
  CHECK(lp_norm(GridFunction(line), 2.0) == 0.0);
  CHECK(lp_norm(one, INFINITY) == 1.0);
  CHECK_THROWS_AS(lp_norm(one, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(lp_norm(one, -1.0), std::invalid_argument);

  auto plane = Grid::uniform(StrataShape({2}), 6.0, 129);
  auto gauss = GridFunction::sample(plane, [](std::span<const double> x) { return std::exp(-(x[0] * x[0] + x[1] * x[1])); });
  CHECK(std::abs(lp_norm(gauss, 2.0) - std::sqrt(std::numbers::pi / 2.0)) < 1e-3);
  CHECK(integral(gauss) == doctest::Approx(std::numbers::pi).epsilon(1e-6));
}

TEST_CASE("lp norms: monotonicity and triangle inequality") {
  auto grid = Grid::uniform(StrataShape({2, 1}), 2.0, 9);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    GridFunction a(grid), b(grid);
    for (std::size_t i = 0; i < grid->size(); ++i) {
      a[i] = n(rng);
      b[i] = n(rng);
    }
    GridFunction bigger = a;
    for (auto& v : bigger.values()) v = std::abs(v) * 1.5;
    for (double p : {1.0, 1.5, 2.0, 4.0, double(INFINITY)}) {
      CHECK(lp_norm(a + b, p) <= lp_norm(a, p) + lp_norm(b, p) + 1e-12);
      CHECK(lp_norm(a, p) <= lp_norm(bigger, p));
    }
  }
}

TEST_CASE("delta, shell and interpolation") {
  auto grid = Grid::uniform(StrataShape({2}), 2.0, 21);
  auto d = GridFunction::delta(grid);
  CHECK(integral(d) == doctest::Approx(1.0));
  CHECK(shell_integral(d) == 0.0);
  auto linear = GridFunction::sample(grid, [](std::span<const double> x) { return 2.0 * x[0] - x[1] + 0.5 * x[0] * x[1]; });
  std::vector<double> x{0.13, -0.71};
  CHECK(interpolate(linear, x) == doctest::Approx(2.0 * 0.13 + 0.71 + 0.5 * 0.13 * -0.71));
  std::vector<double> outside{2.5, 0.0};
  CHECK(interpolate(linear, outside) == 0.0);
}

TEST_CASE("csv snapshot format") {
  auto grid = Grid::uniform(StrataShape({1}), 1.0, 5);
  GridFunction u(grid, 0.25);
  std::ostringstream out;
  write_csv(out, u, "euclidean(1)");
  CHECK(out.str().substr(0, 44) == "# group,N,axes,h\n# euclidean(1),1,5,0.5\n0,-1");
}

TEST_CASE("maximal function") {
  auto g = builtin_group("euclidean(1)");
  auto grid = Grid::uniform(g.shape(), 4.0, 161);
  SUBCASE("constant is preserved at interior points") {
    GridFunction c(grid, 3.0);
    auto m = maximal(g, c);
    for (std::size_t i = 0; i < grid->size(); ++i) CHECK(m[i] == doctest::Approx(3.0));
  }
  SUBCASE("box indicator matches the dyadic oracle") {
    auto f = GridFunction::sample(grid, [](std::span<const double> x) { return std::abs(x[0]) <= 1.0 ? 1.0 : 0.0; });
    auto m = maximal(g, f);
    const auto radii = maximal_radii(g, *grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i) {
      CHECK(m[i] >= std::abs(f[i]));
      const double x = grid->coordinate(0, static_cast<int>(i));
      if (std::abs(x) < 1.5 || std::abs(x) > 3.0) continue;
      // Exact average of the indicator over [x - r, x + r] cut to the box,
      // best dyadic r.
      double oracle = 0.0;
      for (double r : radii) {
        const double overlap = std::max(0.0, std::min(x + r, 1.0) - std::max(x - r, -1.0));
        const double ball = std::min(x + r, 4.0) - std::max(x - r, -4.0);
        oracle = std::max(oracle, overlap / ball);
      }
      worst = std::max(worst, std::abs(m[i] - oracle) / oracle);
      // Dyadic radii lose at most a factor 2 against the full supremum.
      CHECK(m[i] >= 0.5 / (std::abs(x) + 1.0) * 0.95);
    }
    CHECK(worst < 0.05);
  }
}

TEST_CASE("radial integration") {
  auto h = builtin_group("heisenberg");
  auto grid = Grid::uniform(h.shape(), 3.0, 49);
  auto same = radial_integration_check(h, *grid, [](double r) { return std::exp(-r * r * r * r); },
                                       [](double r) { return std::exp(-r * r * r * r); });
  CHECK(same.discrepancy == 0.0);
  auto c = radial_integration_check(h, *grid, [](double r) { return std::exp(-std::pow(r, 4)); },
                                    [](double r) { return std::exp(-2.0 * std::pow(r, 4)); });
  CHECK(c.radial_ratio == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(c.discrepancy < 0.02);

  auto e = builtin_group("euclidean(2)");
  auto plane = Grid::uniform(e.shape(), 7.0, 141);
  auto p = radial_integration_check(e, *plane, [](double r) { return std::exp(-r * r); },
                                    [](double r) { return r * r * std::exp(-r * r); });
  CHECK(p.radial_ratio == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(p.discrepancy < 1e-3);
}

TEST_CASE("Haar measure scaling") {
  auto line = builtin_group("euclidean(1)");
  auto lgrid = Grid::uniform(line.shape(), 8.0, 401);
  auto gauss = [](std::span<const double> x) { return std::exp(-x[0] * x[0]); };
  CHECK(haar_scaling_check(line, lgrid, gauss, 1.0).relative_error == 0.0);
  CHECK(haar_scaling_check(line, lgrid, gauss, 2.0).relative_error < 1e-3);

  auto h = builtin_group("heisenberg");
  auto grid = Grid::uniform(h.shape(), 3.0, 65);
  auto bump = [&](std::span<const double> x) { return std::exp(-std::pow(hom_norm(h.shape(), x), 4)); };
  CHECK(haar_scaling_check(h, grid, bump, 2.0).relative_error < 0.02);
}
