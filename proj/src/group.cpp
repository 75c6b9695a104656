#include "carnot/group.hpp"

#include <algorithm>
#include <array>
#include <regex>

namespace carnot {

StrataShape::StrataShape(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw std::invalid_argument("strata: need at least one stratum");
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (dims_[k] < 1) throw std::invalid_argument("strata: every stratum dimension must be >= 1");
    for (int i = 0; i < dims_[k]; ++i) weights_.push_back(static_cast<int>(k) + 1);
    homogeneous_dimension_ += static_cast<int>(k + 1) * dims_[k];
  }
}

int StrataShape::stratum_begin(int k) const {
  if (k < 1 || k > step()) throw std::out_of_range("stratum index out of range");
  int begin = 0;
  for (int i = 1; i < k; ++i) begin += dims_[i - 1];
  return begin;
}

GroupLaw::GroupLaw(StrataShape s) : shape(std::move(s)) {
  const auto d = static_cast<std::size_t>(shape.dimension());
  q.assign(d, Polynomial(2 * d));
}

std::vector<std::string> law_variable_names(int dimension) {
  std::vector<std::string> names;
  for (int i = 1; i <= dimension; ++i) names.push_back("x" + std::to_string(i));
  for (int i = 1; i <= dimension; ++i) names.push_back("y" + std::to_string(i));
  return names;
}

bool ValidationReport::ok() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.passed; });
}

const ValidationEntry* ValidationReport::find(const std::string& axiom) const {
  for (const auto& e : entries) {
    if (e.axiom == axiom) return &e;
  }
  return nullptr;
}

std::vector<const ValidationEntry*> ValidationReport::failures() const {
  std::vector<const ValidationEntry*> out;
  for (const auto& e : entries) {
    if (!e.passed) out.push_back(&e);
  }
  return out;
}

namespace {

// Images of x and y for a law written over 2d variables, placed into a
// polynomial ring with `total` variables starting at the given offsets.
std::vector<Polynomial> block_images(std::size_t d, std::size_t total, std::size_t x_offset, std::size_t y_offset) {
  std::vector<Polynomial> images;
  images.reserve(2 * d);
  for (std::size_t i = 0; i < d; ++i) images.push_back(Polynomial::variable(total, x_offset + i));
  for (std::size_t i = 0; i < d; ++i) images.push_back(Polynomial::variable(total, y_offset + i));
  return images;
}

// Composition of two symbolic points a.b given as polynomial vectors.
std::vector<Polynomial> compose_symbolic(const GroupLaw& law, const std::vector<Polynomial>& a,
                                         const std::vector<Polynomial>& b) {
  const std::size_t d = a.size();
  std::vector<Polynomial> images;
  images.reserve(2 * d);
  images.insert(images.end(), a.begin(), a.end());
  images.insert(images.end(), b.begin(), b.end());
  std::vector<Polynomial> out;
  out.reserve(d);
  for (std::size_t j = 0; j < d; ++j) out.push_back(a[j] + b[j] + law.q[j].substitute(images));
  return out;
}

std::string monomial_text(const Exponent& e, const Rational& c, int d) {
  auto names = law_variable_names(d);
  return Polynomial::monomial(e, c).to_string(names);
}

}  // namespace

std::vector<Polynomial> composition_polynomials(const GroupLaw& law) {
  const auto d = static_cast<std::size_t>(law.dimension());
  std::vector<Polynomial> x, y;
  for (std::size_t i = 0; i < d; ++i) {
    x.push_back(Polynomial::variable(2 * d, i));
    y.push_back(Polynomial::variable(2 * d, d + i));
  }
  return compose_symbolic(law, x, y);
}

std::vector<Polynomial> inverse_polynomials(const GroupLaw& law) {
  const auto d = static_cast<std::size_t>(law.dimension());
  std::vector<Polynomial> images;
  for (std::size_t i = 0; i < d; ++i) images.push_back(Polynomial::variable(d, i));
  for (std::size_t i = 0; i < d; ++i) images.push_back(Polynomial(d));
  std::vector<Polynomial> inv;
  for (std::size_t j = 0; j < d; ++j) {
    Polynomial yj = -Polynomial::variable(d, j) - law.q[j].substitute(images);
    images[d + j] = yj;
    inv.push_back(std::move(yj));
  }
  return inv;
}

ValidationReport validate_group_law(const GroupLaw& law) {
  ValidationReport report;
  const int d = law.dimension();
  const auto ud = static_cast<std::size_t>(d);
  const auto& shape = law.shape;

  {
    ValidationEntry e{"structure", true, "", std::nullopt};
    if (law.q.size() != ud) {
      e.passed = false;
      e.detail = "expected " + std::to_string(d) + " Q polynomials, got " + std::to_string(law.q.size());
    } else {
      for (std::size_t j = 0; j < ud; ++j) {
        if (law.q[j].num_vars() != 2 * ud) {
          e.passed = false;
          e.detail = "Q" + std::to_string(j + 1) + " is not written over x1..x" + std::to_string(d) + ", y1..y" +
                     std::to_string(d);
          e.coordinate = static_cast<int>(j);
          break;
        }
      }
    }
    report.entries.push_back(e);
    if (!e.passed) return report;
  }

  // Weight of each of the 2d law variables.
  std::vector<int> var_weight(2 * ud);
  for (std::size_t i = 0; i < ud; ++i) var_weight[i] = var_weight[ud + i] = shape.weight(i);

  ValidationEntry first_stratum{"first-stratum-additive", true, "", std::nullopt};
  ValidationEntry triangular{"triangular-dependence", true, "", std::nullopt};
  ValidationEntry mixed{"mixed-monomials", true, "", std::nullopt};
  ValidationEntry homogeneous{"homogeneity", true, "", std::nullopt};
  auto fail = [](ValidationEntry& entry, std::size_t j, std::string detail) {
    if (!entry.passed) return;
    entry.passed = false;
    entry.coordinate = static_cast<int>(j);
    entry.detail = std::move(detail);
  };

  for (std::size_t j = 0; j < ud; ++j) {
    const auto& qj = law.q[j];
    const int wj = shape.weight(j);
    const std::string qname = "Q" + std::to_string(j + 1);
    if (wj == 1 && !qj.is_zero()) fail(first_stratum, j, qname + " must vanish: coordinate has weight 1");
    for (const auto& [e, c] : qj.terms()) {
      bool has_x = false, has_y = false;
      int weighted = 0;
      for (std::size_t v = 0; v < 2 * ud; ++v) {
        if (e[v] == 0) continue;
        (v < ud ? has_x : has_y) = true;
        weighted += var_weight[v] * e[v];
        if (var_weight[v] >= wj) {
          fail(triangular, j,
               qname + " depends on " + law_variable_names(d)[v] + " of weight " + std::to_string(var_weight[v]) +
                   " >= " + std::to_string(wj));
        }
      }
      if (!(has_x && has_y)) fail(mixed, j, qname + " has non-mixed term " + monomial_text(e, c, d));
      if (weighted != wj) {
        fail(homogeneous, j,
             qname + " term " + monomial_text(e, c, d) + " has weighted degree " + std::to_string(weighted) +
                 ", expected " + std::to_string(wj));
      }
    }
  }
  report.entries.push_back(first_stratum);
  report.entries.push_back(triangular);
  report.entries.push_back(mixed);
  report.entries.push_back(homogeneous);

  // Dilation automorphism as a polynomial identity in x, y and lambda.
  {
    ValidationEntry e{"dilation-automorphism", true, "", std::nullopt};
    const std::size_t total = 2 * ud + 1;
    const auto lambda = Polynomial::variable(total, 2 * ud);
    auto images = block_images(ud, total, 0, ud);
    std::vector<Polynomial> dilated = images;
    for (std::size_t v = 0; v < 2 * ud; ++v) dilated[v] = images[v] * lambda.pow(var_weight[v]);
    for (std::size_t j = 0; j < ud; ++j) {
      auto lhs = law.q[j].substitute(dilated);
      auto rhs = law.q[j].substitute(images) * lambda.pow(shape.weight(j));
      if (!(lhs == rhs)) {
        fail(e, j, "Q" + std::to_string(j + 1) + "(delta x, delta y) != lambda^" + std::to_string(shape.weight(j)) +
                       " Q" + std::to_string(j + 1) + "(x, y)");
      }
    }
    report.entries.push_back(e);
  }

  // Exact associativity over 3d variables.
  {
    ValidationEntry e{"associativity", true, "", std::nullopt};
    const std::size_t total = 3 * ud;
    std::vector<Polynomial> x, y, z;
    for (std::size_t i = 0; i < ud; ++i) {
      x.push_back(Polynomial::variable(total, i));
      y.push_back(Polynomial::variable(total, ud + i));
      z.push_back(Polynomial::variable(total, 2 * ud + i));
    }
    auto left = compose_symbolic(law, compose_symbolic(law, x, y), z);
    auto right = compose_symbolic(law, x, compose_symbolic(law, y, z));
    for (std::size_t j = 0; j < ud; ++j) {
      if (!(left[j] == right[j])) {
        auto names = law_variable_names(d);
        for (std::size_t i = 1; i <= ud; ++i) names.push_back("z" + std::to_string(i));
        fail(e, j, "((x.y).z)_" + std::to_string(j + 1) + " - (x.(y.z))_" + std::to_string(j + 1) + " = " +
                       (left[j] - right[j]).to_string(names));
      }
    }
    report.entries.push_back(e);
  }

  // Identity and two-sided inverse.
  {
    ValidationEntry e{"identity", true, "", std::nullopt};
    std::vector<Polynomial> x, zero(ud, Polynomial(ud));
    for (std::size_t i = 0; i < ud; ++i) x.push_back(Polynomial::variable(ud, i));
    auto right_unit = compose_symbolic(law, x, zero);
    auto left_unit = compose_symbolic(law, zero, x);
    for (std::size_t j = 0; j < ud; ++j) {
      if (!(right_unit[j] == x[j]) || !(left_unit[j] == x[j])) {
        fail(e, j, "0 is not a two-sided identity in coordinate " + std::to_string(j + 1));
      }
    }
    report.entries.push_back(e);

    ValidationEntry inv{"inverse", true, "", std::nullopt};
    if (!triangular.passed) {
      inv.passed = false;
      inv.detail = "back-substitution requires triangular dependence";
    } else {
      auto y = inverse_polynomials(law);
      auto xy = compose_symbolic(law, x, y);
      auto yx = compose_symbolic(law, y, x);
      for (std::size_t j = 0; j < ud; ++j) {
        if (!xy[j].is_zero() || !yx[j].is_zero()) fail(inv, j, "x.x^{-1} or x^{-1}.x is not the identity");
      }
    }
    report.entries.push_back(inv);
  }
  return report;
}

std::vector<VectorField> derive_left_invariant_fields(const GroupLaw& law) {
  const auto d = static_cast<std::size_t>(law.dimension());
  // Project the 2d-variable ring onto x only (y = 0).
  std::vector<Polynomial> at_y_zero;
  for (std::size_t i = 0; i < d; ++i) at_y_zero.push_back(Polynomial::variable(d, i));
  for (std::size_t i = 0; i < d; ++i) at_y_zero.push_back(Polynomial(d));

  std::vector<VectorField> fields;
  for (std::size_t k = 0; k < d; ++k) {
    VectorField f = VectorField::coordinate(d, k);
    for (std::size_t j = 0; j < d; ++j) {
      auto dq = law.q[j].derivative(d + k);
      if (!dq.is_zero()) f.coefficient(j) += dq.substitute(at_y_zero);
    }
    fields.push_back(std::move(f));
  }
  return fields;
}

GroupSpec::GroupSpec(std::string name, GroupLaw law, std::optional<std::vector<VectorField>> generators)
    : name_(std::move(name)), law_(std::move(law)) {
  auto report = validate_group_law(law_);
  if (!report.ok()) {
    std::string msg = "group '" + name_ + "' is not a valid stratified law:";
    for (const auto* f : report.failures()) msg += " [" + f->axiom + ": " + f->detail + "]";
    throw GroupError(msg);
  }
  fields_ = derive_left_invariant_fields(law_);
  const auto d1 = static_cast<std::size_t>(law_.shape.first_stratum_dimension());
  generators_.assign(fields_.begin(), fields_.begin() + static_cast<std::ptrdiff_t>(d1));
  if (generators) {
    if (generators->size() != d1) {
      throw GroupError("group '" + name_ + "': expected " + std::to_string(d1) + " generators, got " +
                       std::to_string(generators->size()));
    }
    auto names = default_coordinate_names(fields_.size());
    for (std::size_t k = 0; k < d1; ++k) {
      if (!((*generators)[k] == generators_[k])) {
        throw GroupError("group '" + name_ + "': supplied generator X" + std::to_string(k + 1) + " = " +
                         (*generators)[k].to_string(names) + " differs from the derived " +
                         generators_[k].to_string(names));
      }
    }
  }
  for (const auto& qj : law_.q) compiled_q_.emplace_back(qj);
}

namespace {

// Builds Q over 2d variables from (coefficient, x-index list, y-index list)
// with 1-based indices.
struct Term {
  Rational coefficient;
  std::vector<int> x;
  std::vector<int> y;
};

Polynomial make_q(int d, const std::vector<Term>& terms) {
  const auto ud = static_cast<std::size_t>(d);
  Polynomial p(2 * ud);
  for (const auto& t : terms) {
    Exponent e(2 * ud, 0);
    for (int i : t.x) ++e[static_cast<std::size_t>(i - 1)];
    for (int i : t.y) ++e[ud + static_cast<std::size_t>(i - 1)];
    p.add_term(e, t.coefficient);
  }
  return p;
}

GroupLaw heisenberg_law() {
  GroupLaw law(StrataShape({2, 1}));
  const Rational half(1, 2);
  // s + s' + (y x' - x y') / 2 with (x, y, s) = (x1, x2, x3).
  law.q[2] = make_q(3, {{half, {2}, {1}}, {-half, {1}, {2}}});
  return law;
}

GroupLaw htype22_law() {
  GroupLaw law(StrataShape({4, 2}));
  const Rational half(1, 2);
  // Coordinates (x1, x2, y1, y2, s1, s2) = (x1..x6).
  law.q[4] = make_q(6, {{-half, {1}, {2}}, {half, {2}, {1}}, {-half, {3}, {4}}, {half, {4}, {3}}});
  law.q[5] = make_q(6, {{half, {1}, {3}}, {-half, {2}, {4}}, {-half, {3}, {1}}, {half, {4}, {2}}});
  return law;
}

GroupLaw step3_law() {
  GroupLaw law(StrataShape({2, 1, 1}));
  const Rational half(1, 2), twelfth(1, 12);
  law.q[2] = make_q(4, {{half, {1}, {2}}, {-half, {2}, {1}}});
  // (y3 x1 - y1 x3)/2 + (x1 - y1)(y2 x1 - y1 x2)/12, expanded.
  law.q[3] = make_q(4, {{half, {1}, {3}},
                        {-half, {3}, {1}},
                        {twelfth, {1, 1}, {2}},
                        {-twelfth, {1, 2}, {1}},
                        {-twelfth, {1}, {1, 2}},
                        {twelfth, {2}, {1, 1}}});
  return law;
}

}  // namespace

GroupSpec builtin_group(const std::string& name) {
  if (name == "heisenberg") return GroupSpec("heisenberg", heisenberg_law());
  if (name == "htype22") return GroupSpec("htype22", htype22_law());
  if (name == "step3I") return GroupSpec("step3I", step3_law());
  static const std::regex euclid(R"(euclidean\(?(\d+)\)?)");
  std::smatch m;
  if (std::regex_match(name, m, euclid)) {
    int n = std::stoi(m[1].str());
    if (n < 1 || n > 16) throw GroupError("euclidean dimension must be in [1, 16]");
    return GroupSpec("euclidean(" + std::to_string(n) + ")", GroupLaw(StrataShape({n})));
  }
  throw GroupError("unknown builtin group '" + name + "' (known: heisenberg, htype22, step3I, euclidean(n))");
}

std::vector<std::string> builtin_group_names() { return {"euclidean(n)", "heisenberg", "htype22", "step3I"}; }

double hom_norm(const StrataShape& shape, std::span<const double> x) {
  const int r = shape.step();
  double factorial = 1.0;
  for (int k = 2; k <= r; ++k) factorial *= k;
  const double big = 2.0 * factorial;
  // Per-stratum homogeneous sizes |x^(k)|^{1/k}; scale by their maximum so
  // the big power neither overflows nor underflows.
  std::array<double, 16> sizes{};
  if (r > static_cast<int>(sizes.size())) throw std::invalid_argument("hom_norm: step too large");
  double largest = 0.0;
  for (int k = 1; k <= r; ++k) {
    const int begin = shape.stratum_begin(k);
    double sq = 0.0;
    for (int i = 0; i < shape.dims()[static_cast<std::size_t>(k - 1)]; ++i) {
      sq += x[static_cast<std::size_t>(begin + i)] * x[static_cast<std::size_t>(begin + i)];
    }
    const double size = std::pow(std::sqrt(sq), 1.0 / k);
    sizes[static_cast<std::size_t>(k - 1)] = size;
    largest = std::max(largest, size);
  }
  if (largest == 0.0) return 0.0;
  double sum = 0.0;
  for (int k = 0; k < r; ++k) sum += std::pow(sizes[static_cast<std::size_t>(k)] / largest, big);
  return largest * std::pow(sum, 1.0 / big);
}

}  // namespace carnot
