#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace carnot {

using Rational = boost::multiprecision::cpp_rational;

/// Parses "3", "-1/2", "0.25", "+1e-3" exactly. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);
double to_double(const Rational& q);

using Exponent = std::vector<std::uint16_t>;

/// Sparse multivariate polynomial with exact rational coefficients over a
/// fixed number of variables. Zero coefficients are never stored.
class Polynomial {
 public:
  using TermMap = std::map<Exponent, Rational>;

  explicit Polynomial(std::size_t num_vars = 0) : num_vars_(num_vars) {}

  static Polynomial constant(std::size_t num_vars, const Rational& c);
  static Polynomial variable(std::size_t num_vars, std::size_t index);
  static Polynomial monomial(Exponent exponent, const Rational& c);

  std::size_t num_vars() const { return num_vars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Coefficient of the monomial with all exponents zero.
  Rational constant_term() const;

  void add_term(const Exponent& exponent, const Rational& c);

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Polynomial& other);
  Polynomial& operator*=(const Rational& c);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
  Polynomial operator-() const;

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.num_vars_ == b.num_vars_ && a.terms_ == b.terms_;
  }

  Polynomial pow(unsigned k) const;
  Polynomial derivative(std::size_t var) const;

  /// Replaces variable i by images[i]. All images must share one variable
  /// count, which becomes the variable count of the result.
  Polynomial substitute(std::span<const Polynomial> images) const;

  Rational evaluate(std::span<const Rational> point) const;
  double evaluate(std::span<const double> point) const;

  bool depends_on(std::size_t var) const;
  int total_degree() const;

  /// Renders with the given variable names, e.g. "1/2 x2 y1 - 1/2 x1 y2".
  std::string to_string(std::span<const std::string> names) const;

 private:
  void check_same_vars(const Polynomial& other) const;

  std::size_t num_vars_;
  TermMap terms_;
};

/// A polynomial compiled to plain doubles for repeated evaluation at grid
/// points.
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  explicit CompiledPolynomial(const Polynomial& p);

  double operator()(std::span<const double> point) const;
  bool is_constant() const { return constant_only_; }
  double constant_value() const { return constant_; }

 private:
  std::vector<double> coefficients_;
  std::vector<std::vector<std::pair<std::uint16_t, std::uint16_t>>> factors_;
  double constant_ = 0.0;
  bool constant_only_ = true;
};

}  // namespace carnot
