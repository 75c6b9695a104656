#pragma once

#include "carnot/grid.hpp"

#include <string>
#include <vector>

namespace carnot {

enum class NonlinearityKind { zero, signed_power, absolute_power };

/// F(u) = |u|^{alpha-1} u, |u|^alpha, or 0.
class Nonlinearity {
 public:
  Nonlinearity() = default;
  Nonlinearity(NonlinearityKind kind, double alpha);

  NonlinearityKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  /// floor(alpha): the highest derivative available.
  int order() const;

  double operator()(double x) const;
  /// F^{(j)}(x) for 0 <= j <= order().
  double derivative(double x, int j) const;
  GridFunction apply(const GridFunction& u) const;

 private:
  NonlinearityKind kind_ = NonlinearityKind::zero;
  double alpha_ = 2.0;
};

NonlinearityKind parse_nonlinearity(const std::string& name);
std::string to_string(NonlinearityKind kind);

enum class Regime { N1, N2, invalid };
std::string to_string(Regime regime);

/// Exponents of the semilinear problem on a group of homogeneous dimension N.
struct ProblemParams {
  std::string group;
  int N = 0;
  double alpha = 2.0;
  double p = 2.0;
  double s = 0.0;

  double s_c = 0.0;       // N/p - 2/(alpha-1)
  double s_alpha = 0.0;   // s - (alpha-1)(N/p - s)
  double p_tilde = 0.0;   // 1/p~ = 1/p - s/N; infinite when that is <= 0
  double beta = 0.0;      // N(alpha-1)/(2 p~)
  double B = 0.0;         // 1/(1-beta), infinite when beta >= 1
  Regime regime = Regime::invalid;
  std::vector<std::string> reasons;
};

/// Never throws: failed conditions are listed in `reasons`.
ProblemParams classify(const std::string& group, int N, double alpha, double p, double s);

/// 0.5 (2^alpha C^{alpha-1} M B)^{-1/(1-beta)} norm^{-(alpha-1)/(1-beta)}.
/// Throws std::domain_error when beta >= 1.
double admissible_T0(const ProblemParams& params, double u0_norm, double M, double C);

}  // namespace carnot
