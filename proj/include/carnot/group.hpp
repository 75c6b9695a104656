#pragma once

#include "carnot/polynomial.hpp"
#include "carnot/vector_field.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace carnot {

/// Dimensions (d_1, ..., d_r) of the strata. Coordinates are numbered
/// stratum-major; coordinate j has weight k when it lies in stratum k.
class StrataShape {
 public:
  StrataShape() = default;
  explicit StrataShape(std::vector<int> dims);

  const std::vector<int>& dims() const { return dims_; }
  int step() const { return static_cast<int>(dims_.size()); }
  int dimension() const { return static_cast<int>(weights_.size()); }
  int first_stratum_dimension() const { return dims_.empty() ? 0 : dims_.front(); }
  /// Weight (1-based stratum index) of 0-based coordinate j.
  int weight(std::size_t j) const { return weights_.at(j); }
  const std::vector<int>& weights() const { return weights_; }
  int homogeneous_dimension() const { return homogeneous_dimension_; }
  /// First coordinate index of 1-based stratum k.
  int stratum_begin(int k) const;

  friend bool operator==(const StrataShape& a, const StrataShape& b) { return a.dims_ == b.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<int> weights_;
  int homogeneous_dimension_ = 0;
};

/// (x.y)_j = x_j + y_j + Q_j(x, y). Each Q_j is a polynomial over 2d
/// variables: x_1..x_d are indices 0..d-1, y_1..y_d are indices d..2d-1.
struct GroupLaw {
  StrataShape shape;
  std::vector<Polynomial> q;

  GroupLaw() = default;
  /// All Q_j zero (the abelian law on the given strata).
  explicit GroupLaw(StrataShape s);

  int dimension() const { return shape.dimension(); }
  friend bool operator==(const GroupLaw&, const GroupLaw&) = default;
};

/// Names "x1..xd, y1..yd" used for the 2d variables of a Q polynomial.
std::vector<std::string> law_variable_names(int dimension);

struct ValidationEntry {
  std::string axiom;
  bool passed = true;
  std::string detail;
  /// 0-based coordinate the failure refers to, when it is local to one Q_j.
  std::optional<int> coordinate;
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;

  bool ok() const;
  const ValidationEntry* find(const std::string& axiom) const;
  std::vector<const ValidationEntry*> failures() const;
};

/// Checks triangular dependence, mixed monomials, homogeneity, exact
/// associativity and two-sided inverses. Failures are entries, not faults.
ValidationReport validate_group_law(const GroupLaw& law);

/// Column k of the Jacobian of y -> x.y at y = 0, for every k.
std::vector<VectorField> derive_left_invariant_fields(const GroupLaw& law);

/// Symbolic composition polynomials (x.y)_j over 2d variables.
std::vector<Polynomial> composition_polynomials(const GroupLaw& law);
/// Symbolic inverse polynomials (x^{-1})_j over d variables.
std::vector<Polynomial> inverse_polynomials(const GroupLaw& law);

class GroupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A validated stratified group with its Jacobian basis of left-invariant
/// fields. Immutable once built.
class GroupSpec {
 public:
  /// Validates the law and derives the fields. If generators are given they
  /// must equal the derived first-stratum fields exactly.
  GroupSpec(std::string name, GroupLaw law, std::optional<std::vector<VectorField>> generators = std::nullopt);

  const std::string& name() const { return name_; }
  const GroupLaw& law() const { return law_; }
  const StrataShape& shape() const { return law_.shape; }
  int dimension() const { return law_.dimension(); }
  int homogeneous_dimension() const { return law_.shape.homogeneous_dimension(); }
  int step() const { return law_.shape.step(); }
  /// X_1..X_{d_1}.
  const std::vector<VectorField>& generators() const { return generators_; }
  /// X_1..X_d (Jacobian basis).
  const std::vector<VectorField>& fields() const { return fields_; }

  /// Q_j compiled for floating evaluation, indexed by coordinate.
  const std::vector<CompiledPolynomial>& compiled_q() const { return compiled_q_; }

 private:
  std::string name_;
  GroupLaw law_;
  std::vector<VectorField> fields_;
  std::vector<VectorField> generators_;
  std::vector<CompiledPolynomial> compiled_q_;
};

/// heisenberg, htype22, step3I, euclidean(n) (also "euclideanN").
GroupSpec builtin_group(const std::string& name);
std::vector<std::string> builtin_group_names();

template <typename T>
using Point = std::vector<T>;

namespace detail {
inline void check_point(const GroupSpec& g, std::size_t size) {
  if (static_cast<int>(size) != g.dimension()) {
    throw std::invalid_argument("point has " + std::to_string(size) + " coordinates, group '" + g.name() + "' has " +
                                std::to_string(g.dimension()));
  }
}

inline Rational eval_q(const GroupSpec& g, std::size_t j, std::span<const Rational> xy) {
  return g.law().q[j].evaluate(xy);
}
inline double eval_q(const GroupSpec& g, std::size_t j, std::span<const double> xy) { return g.compiled_q()[j](xy); }
}  // namespace detail

/// x.y, exact for Rational and floating for double.
template <typename T>
Point<T> compose(const GroupSpec& g, const Point<T>& x, const Point<T>& y) {
  detail::check_point(g, x.size());
  detail::check_point(g, y.size());
  const std::size_t d = x.size();
  std::vector<T> xy(2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    xy[i] = x[i];
    xy[d + i] = y[i];
  }
  Point<T> out(d);
  for (std::size_t j = 0; j < d; ++j) out[j] = x[j] + y[j] + detail::eval_q(g, j, xy);
  return out;
}

/// Unique y with x.y = 0, by back-substitution in coordinate order.
template <typename T>
Point<T> inverse(const GroupSpec& g, const Point<T>& x) {
  detail::check_point(g, x.size());
  const std::size_t d = x.size();
  std::vector<T> xy(2 * d, T(0));
  for (std::size_t i = 0; i < d; ++i) xy[i] = x[i];
  Point<T> y(d, T(0));
  for (std::size_t j = 0; j < d; ++j) {
    // Q_j only reads y_k of lower weight, all already solved.
    y[j] = -x[j] - detail::eval_q(g, j, xy);
    xy[d + j] = y[j];
  }
  return y;
}

template <typename T>
Point<T> dilate(const GroupSpec& g, const T& lambda, const Point<T>& x) {
  detail::check_point(g, x.size());
  if (!(lambda > 0)) throw std::invalid_argument("dilation factor must be positive");
  Point<T> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    T factor = lambda;
    for (int k = 1; k < g.shape().weight(j); ++k) factor *= lambda;
    out[j] = x[j] * factor;
  }
  return out;
}

/// |x|_G = (sum_k |x^(k)|^{2r!/k})^{1/(2r!)}.
double hom_norm(const StrataShape& shape, std::span<const double> x);
inline double hom_norm(const GroupSpec& g, const Point<double>& x) {
  detail::check_point(g, x.size());
  return hom_norm(g.shape(), x);
}

}  // namespace carnot
