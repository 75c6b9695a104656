#include "carnot/operator.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace carnot;

namespace {
// Interior points: at least `margin` cells from every face.
bool interior(const Grid& grid, std::size_t p, int margin) {
  std::vector<int> idx(static_cast<std::size_t>(grid.dimension()));
  grid.multi_index(p, idx);
  for (std::size_t m = 0; m < idx.size(); ++m) {
    if (idx[m] < margin || idx[m] >= grid.points(m) - margin) return false;
  }
  return true;
}

GridFunction sample_poly(GridPtr grid, const Polynomial& u) {
  CompiledPolynomial c(u);
  return GridFunction::sample(grid, [&](std::span<const double> x) { return c(x); });
}

GridFunction random_function(GridPtr grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridFunction f(grid);
  for (auto& v : f.values()) v = u(rng);
  return f;
}
}  // namespace

TEST_CASE("one-dimensional sublaplacian is exact on quadratics") {
  auto g = builtin_group("euclidean(1)");
  auto grid = Grid::uniform(g.shape(), 1.0, 21);
  DiscreteSublaplacian L(g, grid);
  auto u = GridFunction::sample(grid, [](std::span<const double> x) { return x[0] * x[0]; });
  auto Lu = L.apply(u);
  for (std::size_t p = 1; p + 1 < grid->size(); ++p) CHECK(Lu[p] == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(L.cfl_constant() == 1.0);
  CHECK(L.symmetric());
}

TEST_CASE("fields on polynomials") {
  for (const char* name : {"heisenberg", "htype22", "step3I"}) {
    auto g = builtin_group(name);
    const auto d = static_cast<std::size_t>(g.dimension());
    auto grid = Grid::uniform(g.shape(), 1.0, d > 4 ? 7 : 11);
    auto x = [&](std::size_t i) { return Polynomial::variable(d, i); };
    const Polynomial quadratic = x(0) * x(d - 1) + x(1) * x(1) - Polynomial::constant(d, 3) * x(d - 1) + x(0);
    const Polynomial cubic = x(0) * x(0) * x(d - 1) + x(1).pow(3);
    for (const auto& field : g.generators()) {
      DiscreteField X = discretize(field, grid);
      // Exact through degree 2 (products of degree <= 1 coefficients and
      // linear-in-each-axis differences).
      auto got = X.apply(sample_poly(grid, quadratic));
      auto want = sample_poly(grid, apply(field, quadratic));
      for (std::size_t p = 0; p < grid->size(); ++p) {
        if (interior(*grid, p, 1)) CHECK(got[p] == doctest::Approx(want[p]).epsilon(1e-10).scale(1.0));
      }
      // Constants are annihilated.
      auto zero = X.apply(GridFunction(grid, 1.0));
      for (std::size_t p = 0; p < grid->size(); ++p) {
        if (interior(*grid, p, 1)) CHECK(std::abs(zero[p]) < 1e-12);
      }
      // Cubics: O(h^2) error, h = 1/5 or 1/3.
      auto gotc = X.apply(sample_poly(grid, cubic));
      auto wantc = sample_poly(grid, apply(field, cubic));
      const double h = grid->spacing(0);
      for (std::size_t p = 0; p < grid->size(); ++p) {
        if (interior(*grid, p, 1)) CHECK(std::abs(gotc[p] - wantc[p]) <= 1.0 * h * h + 1e-12);
      }
    }
  }
}

TEST_CASE("Heisenberg: X s equals y/2 to machine precision") {
  auto g = builtin_group("heisenberg");
  auto grid = Grid::uniform(g.shape(), 2.0, 17);
  DiscreteField X = discretize(g.generators()[0], grid);
  auto s = GridFunction::sample(grid, [](std::span<const double> x) { return x[2]; });
  auto Xs = X.apply(s);
  std::vector<double> pt(3);
  for (std::size_t p = 0; p < grid->size(); ++p) {
    if (!interior(*grid, p, 1)) continue;
    grid->coordinates(p, pt);
    CHECK(Xs[p] == doctest::Approx(0.5 * pt[1]).epsilon(1e-13).scale(1.0));
  }
}

TEST_CASE("sublaplacian: fused, composed and serial paths agree") {
  for (const char* name : {"heisenberg", "step3I", "htype22", "euclidean(2)"}) {
    auto g = builtin_group(name);
    auto grid = Grid::uniform(g.shape(), 1.5, g.dimension() > 4 ? 5 : 9);
    DiscreteSublaplacian L(g, grid);
    auto f = random_function(grid, 17);
    GridFunction a(grid), b(grid), c(grid);
    L.apply(f.values(), a.values());
    L.apply_composed(f.values(), b.values());
    L.apply_serial(f.values(), c.values());
    const double scale = lp_norm(a, INFINITY);
    CHECK(lp_norm(a - c, INFINITY) <= 1e-12 * scale);
    CHECK(lp_norm(b - c, INFINITY) <= 1e-12 * scale);
    CHECK(L.symmetric());
    CHECK(L.matrix().asymmetry() <= 1e-12 * scale);
  }
}

TEST_CASE("sublaplacian: consistency with the symbolic operator") {
  for (const char* name : {"heisenberg", "step3I"}) {
    auto g = builtin_group(name);
    const auto d = static_cast<std::size_t>(g.dimension());
    auto symbol = sublaplacian(g);
    auto x = [&](std::size_t i) { return Polynomial::variable(d, i); };
    const Polynomial u = x(0) * x(d - 1) + x(1) * x(1) * x(0) + x(d - 1) * x(d - 1);
    const Polynomial Lu = apply(symbol, u);
    double previous = 0.0;
    for (int n : {9, 17}) {
      auto grid = Grid::uniform(g.shape(), 1.0, n);
      auto L = discretize(symbol, grid);
      auto got = L.apply(sample_poly(grid, u));
      auto want = sample_poly(grid, Lu);
      double err = 0.0;
      for (std::size_t p = 0; p < grid->size(); ++p) {
        if (interior(*grid, p, 2)) err = std::max(err, std::abs(got[p] - want[p]));
      }
      if (n == 17) CHECK(err <= previous / 3.0 + 1e-12);
      previous = err;
    }
  }
}

TEST_CASE("operators are linear") {
  auto g = builtin_group("heisenberg");
  auto grid = Grid::uniform(g.shape(), 2.0, 11);
  DiscreteSublaplacian L(g, grid);
  auto u = random_function(grid, 1), v = random_function(grid, 2);
  auto lhs = L.apply(2.0 * u + (-3.0) * v);
  auto rhs = 2.0 * L.apply(u) + (-3.0) * L.apply(v);
  CHECK(lp_norm(lhs - rhs, INFINITY) <= 1e-12 * lp_norm(lhs, INFINITY));
}

TEST_CASE("CFL constant") {
  auto g = builtin_group("heisenberg");
  auto grid = Grid::uniform(g.shape(), 6.0, 9);
  DiscreteSublaplacian L(g, grid);
  // (1 + R/2) for each generator.
  CHECK(L.cfl_constant() == doctest::Approx(64.0));
  CHECK(L.time_step(0.25) == doctest::Approx(0.25 * 1.5 * 1.5 / 64.0));
}

TEST_CASE("sublaplacian annihilates constants in the interior and conserves mass") {
  auto g = builtin_group("step3I");
  auto grid = Grid::uniform(g.shape(), 1.0, 9);
  DiscreteSublaplacian L(g, grid);
  auto Lc = L.apply(GridFunction(grid, 1.0));
  for (std::size_t p = 0; p < grid->size(); ++p) {
    if (interior(*grid, p, 2)) CHECK(std::abs(Lc[p]) < 1e-10);
  }
  // Column sums vanish for data supported away from the faces.
  GridFunction bump(grid);
  bump[grid->center()] = 1.0;
  CHECK(std::abs(integral(L.apply(bump))) < 1e-10);
}
