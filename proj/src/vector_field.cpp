#include "carnot/vector_field.hpp"

#include <sstream>
#include <stdexcept>

namespace carnot {

VectorField::VectorField(std::size_t dimension) : coefficients_(dimension, Polynomial(dimension)) {}

VectorField::VectorField(std::vector<Polynomial> coefficients) : coefficients_(std::move(coefficients)) {
  for (const auto& c : coefficients_) {
    if (c.num_vars() != coefficients_.size()) {
      throw std::invalid_argument("vector field coefficient has wrong variable count");
    }
  }
}

VectorField VectorField::coordinate(std::size_t dimension, std::size_t index) {
  VectorField f(dimension);
  f.coefficients_.at(index) = Polynomial::constant(dimension, Rational(1));
  return f;
}

bool VectorField::is_zero() const {
  for (const auto& c : coefficients_) {
    if (!c.is_zero()) return false;
  }
  return true;
}

std::vector<Rational> VectorField::at_origin() const {
  std::vector<Rational> v;
  v.reserve(coefficients_.size());
  for (const auto& c : coefficients_) v.push_back(c.constant_term());
  return v;
}

VectorField& VectorField::operator+=(const VectorField& other) {
  if (other.dimension() != dimension()) throw std::invalid_argument("vector field dimension mismatch");
  for (std::size_t m = 0; m < coefficients_.size(); ++m) coefficients_[m] += other.coefficients_[m];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& other) {
  if (other.dimension() != dimension()) throw std::invalid_argument("vector field dimension mismatch");
  for (std::size_t m = 0; m < coefficients_.size(); ++m) coefficients_[m] -= other.coefficients_[m];
  return *this;
}

VectorField& VectorField::operator*=(const Rational& c) {
  for (auto& p : coefficients_) p *= c;
  return *this;
}

VectorField VectorField::operator-() const {
  VectorField f = *this;
  for (auto& p : f.coefficients_) p = -p;
  return f;
}

std::string VectorField::to_string(std::span<const std::string> coordinate_names) const {
  std::ostringstream out;
  bool first = true;
  for (std::size_t m = 0; m < coefficients_.size(); ++m) {
    const auto& c = coefficients_[m];
    if (c.is_zero()) continue;
    if (!first) out << " + ";
    if (c == Polynomial::constant(dimension(), Rational(1))) {
      out << "d/d" << coordinate_names[m];
    } else {
      out << "(" << c.to_string(coordinate_names) << ") d/d" << coordinate_names[m];
    }
    first = false;
  }
  return first ? "0" : out.str();
}

Polynomial apply(const VectorField& field, const Polynomial& u) {
  if (u.num_vars() != field.dimension()) throw std::invalid_argument("apply: variable count mismatch");
  Polynomial result(u.num_vars());
  for (std::size_t m = 0; m < field.dimension(); ++m) {
    const auto& c = field.coefficient(m);
    if (c.is_zero()) continue;
    auto du = u.derivative(m);
    if (du.is_zero()) continue;
    result += c * du;
  }
  return result;
}

VectorField bracket(const VectorField& f, const VectorField& g) {
  if (f.dimension() != g.dimension()) throw std::invalid_argument("bracket: dimension mismatch");
  const std::size_t d = f.dimension();
  // The symmetric second-order part of fg - gf is sum_{m,n} (f_m g_n - g_m f_n)
  // d_m d_n, which must vanish after symmetrization in (m, n).
  for (std::size_t m = 0; m < d; ++m) {
    for (std::size_t n = m; n < d; ++n) {
      Polynomial sym = f.coefficient(m) * g.coefficient(n) - g.coefficient(m) * f.coefficient(n);
      if (m != n) sym += f.coefficient(n) * g.coefficient(m) - g.coefficient(n) * f.coefficient(m);
      if (!sym.is_zero()) throw std::logic_error("bracket: second-order terms do not cancel");
    }
  }
  VectorField result(d);
  for (std::size_t j = 0; j < d; ++j) {
    result.coefficient(j) = apply(f, g.coefficient(j)) - apply(g, f.coefficient(j));
  }
  return result;
}

std::vector<std::string> default_coordinate_names(std::size_t dimension) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < dimension; ++i) names.push_back("x" + std::to_string(i + 1));
  return names;
}

}  // namespace carnot
