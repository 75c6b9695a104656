#pragma once

#include "carnot/polynomial.hpp"

#include <string>
#include <vector>

namespace carnot {

/// First-order differential operator sum_m c_m(x) d/dx_m with polynomial
/// coefficients over d variables.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(std::size_t dimension);
  explicit VectorField(std::vector<Polynomial> coefficients);

  /// The coordinate field d/dx_index.
  static VectorField coordinate(std::size_t dimension, std::size_t index);

  std::size_t dimension() const { return coefficients_.size(); }
  const Polynomial& coefficient(std::size_t m) const { return coefficients_.at(m); }
  Polynomial& coefficient(std::size_t m) { return coefficients_.at(m); }
  const std::vector<Polynomial>& coefficients() const { return coefficients_; }

  bool is_zero() const;
  /// Coefficients evaluated at the origin.
  std::vector<Rational> at_origin() const;

  VectorField& operator+=(const VectorField& other);
  VectorField& operator-=(const VectorField& other);
  VectorField& operator*=(const Rational& c);
  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator*(const Rational& c, VectorField a) { return a *= c; }
  VectorField operator-() const;
  friend bool operator==(const VectorField&, const VectorField&) = default;

  std::string to_string(std::span<const std::string> coordinate_names) const;

 private:
  std::vector<Polynomial> coefficients_;
};

/// X u = sum_m c_m du/dx_m, exact.
Polynomial apply(const VectorField& field, const Polynomial& u);

/// Commutator [f, g] = fg - gf as a first-order field. Throws std::logic_error
/// if the second-order part fails to cancel.
VectorField bracket(const VectorField& f, const VectorField& g);

/// Default coordinate names x1..xd.
std::vector<std::string> default_coordinate_names(std::size_t dimension);

}  // namespace carnot
