#include "carnot/polynomial.hpp"
#include "carnot/vector_field.hpp"

#include <doctest.h>

using namespace carnot;

namespace {
Polynomial var(std::size_t n, std::size_t i) { return Polynomial::variable(n, i); }
Polynomial cst(std::size_t n, const char* c) { return Polynomial::constant(n, parse_rational(c)); }
}  // namespace

TEST_CASE("rational literals parse exactly") {
  CHECK(parse_rational("3") == Rational(3));
  CHECK(parse_rational("-1/2") == Rational(-1, 2));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("+1e-3") == Rational(1, 1000));
  CHECK(parse_rational("-2.5E2") == Rational(-250));
  CHECK(parse_rational("4/6") == Rational(2, 3));
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
  CHECK(to_string(Rational(-1, 12)) == "-1/12");
}

TEST_CASE("zero coefficients are never stored") {
  auto x = var(2, 0), y = var(2, 1);
  auto p = x + y - x;
  CHECK(p == y);
  CHECK(p.terms().size() == 1);
  CHECK((x - x).is_zero());
  Polynomial q(2);
  q.add_term({1, 0}, Rational(0));
  CHECK(q.is_zero());
}

TEST_CASE("arithmetic, powers and derivatives") {
  auto x = var(2, 0), y = var(2, 1);
  auto p = (x + y).pow(3);
  CHECK(p.terms().size() == 4);
  CHECK(p.total_degree() == 3);
  CHECK(p.derivative(0) == Rational(3) * (x + y).pow(2));
  auto q = x * y * cst(2, "1/2");
  CHECK(q.derivative(1) == cst(2, "1/2") * x);
  CHECK(q.derivative(0).derivative(0).is_zero());
  CHECK(cst(2, "7").is_constant());
  CHECK(cst(2, "7").constant_term() == Rational(7));
  CHECK(-q + q == Polynomial(2));
}

TEST_CASE("substitution and evaluation") {
  // p(x, y) = x^2 y - 1/3 ; substitute x -> a + b, y -> a b
  auto x = var(2, 0), y = var(2, 1);
  auto p = x * x * y - cst(2, "1/3");
  std::vector<Polynomial> images{var(2, 0) + var(2, 1), var(2, 0) * var(2, 1)};
  auto r = p.substitute(images);
  std::vector<Rational> pt{Rational(2), Rational(-1, 2)};
  // (3/2)^2 * (-1) - 1/3 = -9/4 - 1/3 = -31/12
  CHECK(r.evaluate(pt) == Rational(-31, 12));
  std::vector<double> ptd{2.0, -0.5};
  CHECK(r.evaluate(ptd) == doctest::Approx(-31.0 / 12.0));
  CompiledPolynomial c(r);
  CHECK(c(ptd) == doctest::Approx(-31.0 / 12.0));
  CHECK(p.depends_on(1));
  CHECK_FALSE(x.depends_on(1));
}

TEST_CASE("rendering") {
  auto x = var(2, 0), y = var(2, 1);
  std::vector<std::string> names{"x", "y"};
  CHECK((cst(2, "1/2") * x * y - y).to_string(names) == "1/2*x*y - y");
  CHECK(Polynomial(2).to_string(names) == "0");
}

TEST_CASE("vector fields: apply and bracket on the Heisenberg fields") {
  const std::size_t d = 3;
  VectorField X = VectorField::coordinate(d, 0);
  X.coefficient(2) = cst(d, "1/2") * var(d, 1);
  VectorField Y = VectorField::coordinate(d, 1);
  Y.coefficient(2) = cst(d, "-1/2") * var(d, 0);
  VectorField S = VectorField::coordinate(d, 2);

  CHECK(apply(X, var(d, 2)) == cst(d, "1/2") * var(d, 1));
  CHECK(apply(Y, var(d, 0) * var(d, 2)) == cst(d, "-1/2") * var(d, 0) * var(d, 0));
  CHECK(apply(X, cst(d, "1")).is_zero());
  CHECK(bracket(X, Y) == -S);
  CHECK(bracket(X, X).is_zero());
  CHECK(bracket(X, S).is_zero());
  auto origin = X.at_origin();
  CHECK(origin == std::vector<Rational>{1, 0, 0});
}
