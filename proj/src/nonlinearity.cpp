#include "carnot/nonlinearity.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace carnot {

Nonlinearity::Nonlinearity(NonlinearityKind kind, double alpha) : kind_(kind), alpha_(alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) throw std::invalid_argument("nonlinearity exponent must exceed 1");
}

int Nonlinearity::order() const { return static_cast<int>(std::floor(alpha_)); }

double Nonlinearity::operator()(double x) const {
  switch (kind_) {
    case NonlinearityKind::zero:
      return 0.0;
    case NonlinearityKind::signed_power:
      return std::copysign(std::pow(std::abs(x), alpha_), x);
    case NonlinearityKind::absolute_power:
      return std::pow(std::abs(x), alpha_);
  }
  return 0.0;
}

double Nonlinearity::derivative(double x, int j) const {
  if (j < 0 || j > order()) throw std::invalid_argument("derivative order out of range");
  if (kind_ == NonlinearityKind::zero) return 0.0;
  if (j == 0) return (*this)(x);
  double c = 1.0;
  for (int i = 0; i < j; ++i) c *= alpha_ - i;
  const double a = std::abs(x);
  // d^j/dx^j of sign(x)^e |x|^alpha picks up sign(x)^{e+j}.
  const int e = kind_ == NonlinearityKind::signed_power ? 1 : 0;
  if (a == 0.0) return alpha_ > j || (e + j) % 2 == 1 ? 0.0 : c;
  const double magnitude = c * std::pow(a, alpha_ - j);
  return ((e + j) % 2 == 1 && x < 0.0) ? -magnitude : magnitude;
}

GridFunction Nonlinearity::apply(const GridFunction& u) const {
  GridFunction out(u.grid_ptr());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = (*this)(u[i]);
  return out;
}

NonlinearityKind parse_nonlinearity(const std::string& name) {
  if (name == "signed" || name == "signed_power") return NonlinearityKind::signed_power;
  if (name == "absolute" || name == "absolute_power") return NonlinearityKind::absolute_power;
  if (name == "zero" || name == "none") return NonlinearityKind::zero;
  throw std::invalid_argument("unknown nonlinearity '" + name + "' (signed, absolute, zero)");
}

std::string to_string(NonlinearityKind kind) {
  switch (kind) {
    case NonlinearityKind::zero:
      return "zero";
    case NonlinearityKind::signed_power:
      return "signed";
    case NonlinearityKind::absolute_power:
      return "absolute";
  }
  return "zero";
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::N1:
      return "N1";
    case Regime::N2:
      return "N2";
    case Regime::invalid:
      return "invalid";
  }
  return "invalid";
}

ProblemParams classify(const std::string& group, int N, double alpha, double p, double s) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  ProblemParams out;
  out.group = group;
  out.N = N;
  out.alpha = alpha;
  out.p = p;
  out.s = s;
  bool basic = true;
  if (!(N > 0)) {
    out.reasons.push_back("N > 0 fails");
    basic = false;
  }
  if (!(alpha > 1.0)) {
    out.reasons.push_back("alpha > 1 fails");
    basic = false;
  }
  if (!(p > 1.0 && p < inf)) {
    out.reasons.push_back("1 < p < inf fails");
    basic = false;
  }
  if (!(s >= 0.0)) {
    out.reasons.push_back("s >= 0 fails");
    basic = false;
  }
  if (!basic) {
    out.s_c = out.s_alpha = out.p_tilde = out.beta = out.B = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const double np = N / p;
  out.s_c = np - 2.0 / (alpha - 1.0);
  out.s_alpha = s - (alpha - 1.0) * (np - s);
  const double inv = 1.0 / p - s / N;
  out.p_tilde = inv > 0.0 ? 1.0 / inv : inf;
  out.beta = inv > 0.0 ? N * (alpha - 1.0) * inv / 2.0 : 0.0;
  out.B = out.beta < 1.0 ? 1.0 / (1.0 - out.beta) : inf;

  bool common = true;
  if (!(s > out.s_c)) {
    out.reasons.push_back("s > s_c fails");
    common = false;
  }
  if (!(out.beta < 1.0)) {
    out.reasons.push_back("beta < 1 fails");
    common = false;
  }
  const bool n1 = out.s_alpha <= 0.0 && s > np - N / alpha;
  const bool n2 = out.s_alpha > 0.0 && out.s_alpha < alpha - 1.0 && s > 0.0 && s < np;
  if (!n1 && !n2) {
    if (out.s_alpha <= 0.0) {
      out.reasons.push_back("s > N/p - N/alpha fails");
    } else {
      if (!(out.s_alpha < alpha - 1.0)) out.reasons.push_back("s_alpha < alpha - 1 fails");
      if (!(s < np)) out.reasons.push_back("s < N/p fails");
    }
  }
  if (common && n1) out.regime = Regime::N1;
  else if (common && n2) out.regime = Regime::N2;
  return out;
}

double admissible_T0(const ProblemParams& params, double u0_norm, double M, double C) {
  if (!(params.beta < 1.0)) throw std::domain_error("admissible T0: beta >= 1");
  if (!(u0_norm >= 0.0) || !(M > 0.0) || !(C > 0.0)) throw std::invalid_argument("admissible T0: bad constants");
  const double a = params.alpha;
  const double e = 1.0 / (1.0 - params.beta);
  const double base = std::pow(2.0, a) * std::pow(C, a - 1.0) * M * params.B;
  if (u0_norm == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * std::pow(base, -e) * std::pow(u0_norm, -(a - 1.0) * e);
}

}  // namespace carnot
