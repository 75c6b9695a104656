#include "carnot/polynomial.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace carnot {

namespace {

boost::multiprecision::cpp_int parse_integer(std::string_view digits, std::string_view whole) {
  if (digits.empty()) {
    throw std::invalid_argument("malformed rational literal '" + std::string(whole) + "'");
  }
  boost::multiprecision::cpp_int value = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw std::invalid_argument("malformed rational literal '" + std::string(whole) + "'");
    }
    value = value * 10 + (c - '0');
  }
  return value;
}

boost::multiprecision::cpp_int power_of_ten(long exponent) {
  boost::multiprecision::cpp_int result = 1;
  for (long i = 0; i < exponent; ++i) result *= 10;
  return result;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  if (body.empty()) throw std::invalid_argument("empty rational literal");

  Rational value;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = parse_integer(body.substr(0, slash), text);
    auto den = parse_integer(body.substr(slash + 1), text);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    value = Rational(num, den);
  } else {
    long exponent = 0;
    std::string_view mantissa = body;
    if (auto e = body.find_first_of("eE"); e != std::string_view::npos) {
      std::string_view exp_text = body.substr(e + 1);
      bool exp_negative = false;
      if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
        exp_negative = exp_text.front() == '-';
        exp_text.remove_prefix(1);
      }
      auto magnitude = parse_integer(exp_text, text);
      if (magnitude > 400) throw std::invalid_argument("exponent out of range in '" + std::string(text) + "'");
      exponent = magnitude.convert_to<long>() * (exp_negative ? -1 : 1);
      mantissa = body.substr(0, e);
    }
    std::string digits;
    if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
      std::string_view frac = mantissa.substr(dot + 1);
      digits = std::string(mantissa.substr(0, dot)) + std::string(frac);
      exponent -= static_cast<long>(frac.size());
      if (digits.empty()) throw std::invalid_argument("malformed rational literal '" + std::string(text) + "'");
    } else {
      digits = std::string(mantissa);
    }
    auto num = parse_integer(digits, text);
    if (exponent >= 0) {
      value = Rational(num * power_of_ten(exponent));
    } else {
      value = Rational(num, power_of_ten(-exponent));
    }
  }
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& q) {
  std::ostringstream out;
  out << boost::multiprecision::numerator(q);
  if (boost::multiprecision::denominator(q) != 1) out << '/' << boost::multiprecision::denominator(q);
  return out.str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

Polynomial Polynomial::constant(std::size_t num_vars, const Rational& c) {
  Polynomial p(num_vars);
  p.add_term(Exponent(num_vars, 0), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t num_vars, std::size_t index) {
  if (index >= num_vars) throw std::out_of_range("variable index out of range");
  Exponent e(num_vars, 0);
  e[index] = 1;
  return monomial(std::move(e), Rational(1));
}

Polynomial Polynomial::monomial(Exponent exponent, const Rational& c) {
  Polynomial p(exponent.size());
  p.add_term(exponent, c);
  return p;
}

bool Polynomial::is_constant() const {
  if (terms_.empty()) return true;
  if (terms_.size() > 1) return false;
  for (auto k : terms_.begin()->first) {
    if (k != 0) return false;
  }
  return true;
}

Rational Polynomial::constant_term() const {
  auto it = terms_.find(Exponent(num_vars_, 0));
  return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::add_term(const Exponent& exponent, const Rational& c) {
  if (exponent.size() != num_vars_) throw std::invalid_argument("exponent length does not match variable count");
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(exponent, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void Polynomial::check_same_vars(const Polynomial& other) const {
  if (num_vars_ != other.num_vars_) {
    throw std::invalid_argument("polynomials over different variable counts (" + std::to_string(num_vars_) + " vs " +
                                std::to_string(other.num_vars_) + ")");
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  check_same_vars(other);
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  check_same_vars(other);
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.check_same_vars(b);
  Polynomial result(a.num_vars_);
  Exponent e(a.num_vars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = static_cast<std::uint16_t>(ea[i] + eb[i]);
      result.add_term(e, ca * cb);
    }
  }
  return result;
}

Polynomial& Polynomial::operator*=(const Polynomial& other) {
  *this = *this * other;
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, coeff] : terms_) coeff *= c;
  return *this;
}

Polynomial Polynomial::operator-() const {
  Polynomial result = *this;
  for (auto& [e, c] : result.terms_) c = -c;
  return result;
}

Polynomial Polynomial::pow(unsigned k) const {
  Polynomial result = constant(num_vars_, Rational(1));
  Polynomial base = *this;
  while (k > 0) {
    if (k & 1U) result *= base;
    k >>= 1U;
    if (k > 0) base = base * base;
  }
  return result;
}

Polynomial Polynomial::derivative(std::size_t var) const {
  if (var >= num_vars_) throw std::out_of_range("variable index out of range");
  Polynomial result(num_vars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponent d = e;
    --d[var];
    result.add_term(d, c * e[var]);
  }
  return result;
}

Polynomial Polynomial::substitute(std::span<const Polynomial> images) const {
  if (images.size() != num_vars_) throw std::invalid_argument("substitute: need one image per variable");
  const std::size_t target_vars = images.empty() ? 0 : images.front().num_vars();
  for (const auto& img : images) {
    if (img.num_vars() != target_vars) throw std::invalid_argument("substitute: images over different variable counts");
  }
  // Cache powers per variable; exponents are small.
  std::vector<std::vector<Polynomial>> powers(num_vars_);
  auto power_of = [&](std::size_t var, unsigned k) -> const Polynomial& {
    auto& cache = powers[var];
    if (cache.empty()) cache.push_back(constant(target_vars, Rational(1)));
    while (cache.size() <= k) cache.push_back(cache.back() * images[var]);
    return cache[k];
  };
  Polynomial result(target_vars);
  for (const auto& [e, c] : terms_) {
    Polynomial term = constant(target_vars, c);
    for (std::size_t v = 0; v < num_vars_; ++v) {
      if (e[v] != 0) term *= power_of(v, e[v]);
    }
    result += term;
  }
  return result;
}

Rational Polynomial::evaluate(std::span<const Rational> point) const {
  if (point.size() != num_vars_) throw std::invalid_argument("evaluate: point dimension mismatch");
  Rational sum = 0;
  for (const auto& [e, c] : terms_) {
    Rational term = c;
    for (std::size_t v = 0; v < num_vars_; ++v) {
      for (unsigned k = 0; k < e[v]; ++k) term *= point[v];
    }
    sum += term;
  }
  return sum;
}

double Polynomial::evaluate(std::span<const double> point) const {
  if (point.size() != num_vars_) throw std::invalid_argument("evaluate: point dimension mismatch");
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double term = to_double(c);
    for (std::size_t v = 0; v < num_vars_; ++v) {
      if (e[v] != 0) term *= std::pow(point[v], static_cast<int>(e[v]));
    }
    sum += term;
  }
  return sum;
}

bool Polynomial::depends_on(std::size_t var) const {
  for (const auto& [e, c] : terms_) {
    if (e[var] != 0) return true;
  }
  return false;
}

int Polynomial::total_degree() const {
  int degree = -1;
  for (const auto& [e, c] : terms_) {
    int d = 0;
    for (auto k : e) d += k;
    degree = std::max(degree, d);
  }
  return degree;
}

std::string Polynomial::to_string(std::span<const std::string> names) const {
  if (names.size() != num_vars_) throw std::invalid_argument("to_string: need one name per variable");
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  // Descending lexicographic order reads naturally (x1 terms first).
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    Rational magnitude = c < 0 ? Rational(-c) : c;
    if (first) {
      if (c < 0) out << "-";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    bool has_vars = false;
    std::ostringstream vars;
    for (std::size_t v = 0; v < num_vars_; ++v) {
      if (e[v] == 0) continue;
      if (has_vars) vars << '*';
      vars << names[v];
      if (e[v] > 1) vars << '^' << e[v];
      has_vars = true;
    }
    if (!has_vars) {
      out << carnot::to_string(magnitude);
    } else if (magnitude == 1) {
      out << vars.str();
    } else {
      out << carnot::to_string(magnitude) << '*' << vars.str();
    }
    first = false;
  }
  return out.str();
}

CompiledPolynomial::CompiledPolynomial(const Polynomial& p) {
  for (const auto& [e, c] : p.terms()) {
    std::vector<std::pair<std::uint16_t, std::uint16_t>> f;
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (e[v] != 0) f.emplace_back(static_cast<std::uint16_t>(v), e[v]);
    }
    if (f.empty()) {
      constant_ += to_double(c);
    } else {
      coefficients_.push_back(to_double(c));
      factors_.push_back(std::move(f));
      constant_only_ = false;
    }
  }
}

double CompiledPolynomial::operator()(std::span<const double> point) const {
  double sum = constant_;
  for (std::size_t t = 0; t < coefficients_.size(); ++t) {
    double term = coefficients_[t];
    for (auto [v, k] : factors_[t]) {
      double x = point[v];
      for (unsigned i = 0; i < k; ++i) term *= x;
    }
    sum += term;
  }
  return sum;
}

}  // namespace carnot
