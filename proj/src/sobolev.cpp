#include "carnot/sobolev.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace carnot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double euclidean_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

Eigen::VectorXd lanczos_coefficients(const std::vector<double>& alpha, const std::vector<double>& beta,
                                     std::size_t m, double beta0, const std::function<double(double)>& phi) {
  Eigen::VectorXd diag(static_cast<Eigen::Index>(m));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(m > 0 ? m - 1 : 0));
  for (std::size_t i = 0; i < m; ++i) diag[static_cast<Eigen::Index>(i)] = alpha[i];
  for (std::size_t i = 0; i + 1 < m; ++i) sub[static_cast<Eigen::Index>(i)] = beta[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  const auto& q = es.eigenvectors();
  const auto& theta = es.eigenvalues();
  Eigen::VectorXd weights(static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < weights.size(); ++i) weights[i] = phi(std::max(theta[i], 0.0)) * q(0, i);
  return beta0 * (q * weights);
}

double relative_change(const Eigen::VectorXd& now, const Eigen::VectorXd& before) {
  const double scale = now.norm();
  if (scale == 0.0) return before.size() == 0 ? 1.0 : before.norm();
  double diff = 0.0;
  for (Eigen::Index i = 0; i < now.size(); ++i) {
    const double b = i < before.size() ? before[i] : 0.0;
    diff += (now[i] - b) * (now[i] - b);
  }
  return std::sqrt(diff) / scale;
}

void apply_polynomial(const DiscreteSublaplacian& op, GridFunction& u, int k, bool shifted) {
  std::vector<double> tmp(u.size());
  for (int i = 0; i < k; ++i) {
    op.apply(u.values(), tmp);
    auto v = u.values();
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = shifted ? v[j] + tmp[j] : tmp[j];
  }
}

struct Ratio {
  double num = 0.0;
  double den = 0.0;
};

FamilyResult finish_family(const std::vector<double>& lambdas, const std::vector<Ratio>& parts, const char* what) {
  FamilyResult out;
  out.lambdas = lambdas;
  bool all_zero = true;
  for (const auto& r : parts) {
    if (r.num != 0.0 || r.den != 0.0) all_zero = false;
  }
  if (all_zero) {
    out.skipped = true;
    out.spread = 1.0;
    return out;
  }
  double lo = kInf, hi = 0.0;
  for (const auto& r : parts) {
    if (r.den == 0.0) {
      if (r.num == 0.0) {
        out.skipped = true;
        continue;
      }
      throw std::domain_error(std::string(what) + ": norm underflow");
    }
    const double q = r.num / r.den;
    out.ratios.push_back(q);
    if (!std::isfinite(q)) out.finite = false;
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  out.max_ratio = hi;
  out.spread = lo > 0.0 ? hi / lo : kInf;
  return out;
}

int lcm_of_weights(const StrataShape& shape) {
  int l = 1;
  for (int k = 1; k <= shape.step(); ++k) l = std::lcm(l, k);
  return l;
}

}  // namespace

double SubordinationRule::polynomial(double theta) const {
  const double base = inhomogeneous ? 1.0 + theta : theta;
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= base;
  return out;
}

double SubordinationRule::symbol(double theta, bool exact_tails) const {
  const double poly = polynomial(theta);
  if (nodes.empty()) return poly * tail_weight;
  double sum = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) sum += weights[j] * std::exp(-nodes[j] * theta);
  const double rho = inhomogeneous ? 1.0 + theta : theta;
  if (!exact_tails || !(rho > 0.0)) {
    sum += tail_weight;
  } else {
    const double scale = std::pow(rho, -exponent);
    sum += scale * boost::math::gamma_p(exponent, nu_min * rho);
    sum += scale * boost::math::gamma_q(exponent, nu_max * rho);
  }
  return poly * sum;
}

SubordinationRule make_rule(double s, bool inhomogeneous, const QuadratureOptions& options) {
  if (!(std::abs(s) <= 4.0)) throw std::invalid_argument("fractional power: |s| must not exceed 4");
  if (options.nodes < 2 || !(options.nu_min > 0.0) || !(options.nu_max > options.nu_min)) {
    throw std::invalid_argument("fractional power: bad quadrature range");
  }
  SubordinationRule rule;
  rule.s = s;
  rule.inhomogeneous = inhomogeneous;
  rule.nu_min = options.nu_min;
  rule.nu_max = options.nu_max;
  if (s >= 0.0 && s == std::floor(s)) {
    rule.k = static_cast<int>(s);
    rule.tail_weight = 1.0;
    return rule;
  }
  if (s < 0.0 && !inhomogeneous) throw std::invalid_argument("fractional power: negative powers need Id+L");
  rule.k = s > 0.0 ? static_cast<int>(std::floor(s)) + 1 : 0;
  rule.exponent = s > 0.0 ? rule.k - s : -s;
  const double e = rule.exponent;
  const double gamma = std::tgamma(e);
  const double a = std::log(options.nu_min);
  const double step = (std::log(options.nu_max) - a) / (options.nodes - 1);
  for (int j = 0; j < options.nodes; ++j) {
    const double nu = std::exp(a + j * step);
    const double trap = (j == 0 || j == options.nodes - 1) ? 0.5 * step : step;
    double w = trap * std::pow(nu, e) / gamma;
    if (inhomogeneous) w *= std::exp(-nu);
    rule.nodes.push_back(nu);
    rule.weights.push_back(w);
  }
  rule.tail_weight = std::pow(options.nu_min, e) / (e * gamma);
  return rule;
}

LanczosResult lanczos_apply(const DiscreteSublaplacian& op, const GridFunction& f,
                            const std::vector<std::function<double(double)>>& phis, double tol,
                            std::size_t max_steps) {
  const std::size_t n = f.size();
  LanczosResult out;
  out.values.assign(phis.size(), GridFunction(f.grid_ptr()));
  const double beta0 = euclidean_norm(f.values());
  if (beta0 == 0.0 || phis.empty()) {
    out.converged = true;
    return out;
  }
  max_steps = std::max<std::size_t>(1, std::min(max_steps, n));

  std::vector<double> alpha, beta;
  std::vector<double> v_prev(n, 0.0), v(n), w(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = f[i] / beta0;

  std::vector<Eigen::VectorXd> coeffs(phis.size()), previous(phis.size());
  std::size_t next_check = 8;
  double anorm = 0.0;
  for (;;) {
    const std::size_t j = alpha.size();
    op.apply(v, w);
    if (j > 0) {
      for (std::size_t i = 0; i < n; ++i) w[i] -= beta[j - 1] * v_prev[i];
    }
    const double a = dot(v, w);
    for (std::size_t i = 0; i < n; ++i) w[i] -= a * v[i];
    const double b = euclidean_norm(w);
    alpha.push_back(a);
    const std::size_t m = alpha.size();
    anorm = std::max(anorm, std::abs(a) + b + (j > 0 ? beta[j - 1] : 0.0));
    const bool invariant = b <= 1e-13 * anorm;
    const bool last = invariant || m >= max_steps;
    if (m >= next_check || last) {
      bool ok = true;
      for (std::size_t k = 0; k < phis.size(); ++k) {
        coeffs[k] = lanczos_coefficients(alpha, beta, m, beta0, phis[k]);
        if (relative_change(coeffs[k], previous[k]) > tol) ok = false;
        previous[k] = coeffs[k];
      }
      next_check = m + std::max<std::size_t>(8, m / 4);
      if (ok || last) {
        out.converged = ok || invariant;
        break;
      }
    }
    beta.push_back(b);
    v_prev.swap(v);
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / b;
  }

  const std::size_t m = alpha.size();
  out.steps = m;
  std::fill(v_prev.begin(), v_prev.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i] = f[i] / beta0;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < phis.size(); ++k) {
      const double c = coeffs[k][static_cast<Eigen::Index>(j)];
      auto y = out.values[k].values();
      for (std::size_t i = 0; i < n; ++i) y[i] += c * v[i];
    }
    if (j + 1 == m) break;
    op.apply(v, w);
    if (j > 0) {
      for (std::size_t i = 0; i < n; ++i) w[i] -= beta[j - 1] * v_prev[i];
    }
    for (std::size_t i = 0; i < n; ++i) w[i] -= alpha[j] * v[i];
    v_prev.swap(v);
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / beta[j];
  }
  return out;
}

FractionalCalculus::FractionalCalculus(OperatorPtr op, QuadratureOptions options, SemigroupBackend backend,
                                       PropagatorConfig sweep_config)
    : op_(std::move(op)), options_(options), backend_(backend), sweep_config_(sweep_config) {
  make_rule(0.5, true, options_);
  if (backend_ == SemigroupBackend::krylov && !op_->symmetric()) {
    throw std::invalid_argument("krylov backend needs a symmetric discrete sublaplacian");
  }
}

FractionalCalculus::FractionalCalculus(const GroupSpec& g, GridPtr grid, QuadratureOptions options,
                                       SemigroupBackend backend)
    : FractionalCalculus(std::make_shared<const DiscreteSublaplacian>(g, std::move(grid)), options, backend) {}

std::vector<GridFunction> FractionalCalculus::evaluate(const GridFunction& f,
                                                       const std::vector<SubordinationRule>& rules,
                                                       std::vector<PowerDiagnostics>* diags) const {
  const std::size_t count = rules.size();
  std::vector<GridFunction> values, first, last;
  std::size_t steps = 0;
  bool converged = true;

  if (backend_ == SemigroupBackend::krylov) {
    std::vector<std::function<double(double)>> phis;
    const bool exact = options_.exact_tails;
    for (const auto& rule : rules) phis.push_back([&rule, exact](double t) { return rule.symbol(t, exact); });
    if (diags) {
      for (const auto& rule : rules) {
        if (rule.nodes.empty()) continue;
        phis.push_back([&rule](double t) {
          return rule.polynomial(t) * rule.weights.front() * std::exp(-rule.nodes.front() * t);
        });
        phis.push_back([&rule](double t) {
          return rule.polynomial(t) * rule.weights.back() * std::exp(-rule.nodes.back() * t);
        });
      }
    }
    auto res = lanczos_apply(*op_, f, phis, options_.krylov_tol);
    steps = res.steps;
    converged = res.converged;
    values.assign(res.values.begin(), res.values.begin() + static_cast<std::ptrdiff_t>(count));
    std::size_t at = count;
    for (const auto& rule : rules) {
      if (!diags || rule.nodes.empty()) {
        first.emplace_back(f.grid_ptr());
        last.emplace_back(f.grid_ptr());
      } else {
        first.push_back(std::move(res.values[at++]));
        last.push_back(std::move(res.values[at++]));
      }
    }
  } else {
    HeatPropagator heat(op_, sweep_config_);
    for (const auto& rule : rules) {
      values.push_back(rule.tail_weight * f);
      first.emplace_back(f.grid_ptr());
      last.emplace_back(f.grid_ptr());
    }
    const SubordinationRule* with_nodes = nullptr;
    for (const auto& rule : rules) {
      if (!rule.nodes.empty()) with_nodes = &rule;
    }
    if (with_nodes) {
      const auto& nodes = with_nodes->nodes;
      GridFunction u = f;
      double t = 0.0;
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double span = nodes[j] - t;
        const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(span / heat.dt() - 1e-9)));
        heat.advance(u.values(), span / static_cast<double>(n), n, steps, t);
        steps += n;
        t = nodes[j];
        for (std::size_t r = 0; r < count; ++r) {
          if (rules[r].nodes.empty()) continue;
          values[r].axpy(rules[r].weights[j], u);
          if (j == 0) first[r].axpy(rules[r].weights[j], u);
          if (j + 1 == nodes.size()) last[r].axpy(rules[r].weights[j], u);
        }
      }
    }
    for (std::size_t r = 0; r < count; ++r) {
      apply_polynomial(*op_, values[r], rules[r].k, rules[r].inhomogeneous);
      if (diags && !rules[r].nodes.empty()) {
        apply_polynomial(*op_, first[r], rules[r].k, rules[r].inhomogeneous);
        apply_polynomial(*op_, last[r], rules[r].k, rules[r].inhomogeneous);
      }
    }
  }

  for (std::size_t r = 0; r < count; ++r) {
    if (!rules[r].nodes.empty() || backend_ != SemigroupBackend::krylov) continue;
    values[r] = f;
    apply_polynomial(*op_, values[r], rules[r].k, rules[r].inhomogeneous);
  }

  if (diags) {
    diags->assign(count, PowerDiagnostics{});
    for (std::size_t r = 0; r < count; ++r) {
      auto& d = (*diags)[r];
      d.krylov_steps = backend_ == SemigroupBackend::krylov ? steps : 0;
      d.converged = converged;
      const double total = lp_norm(values[r], 2.0);
      if (total > 0.0 && !rules[r].nodes.empty()) {
        d.first_node_share = lp_norm(first[r], 2.0) / total;
        d.last_node_share = lp_norm(last[r], 2.0) / total;
      }
      d.range_warning = d.first_node_share > 0.01 || d.last_node_share > 0.01;
    }
  }
  return values;
}

GridFunction FractionalCalculus::power(const GridFunction& f, double s, bool inhomogeneous,
                                       PowerDiagnostics* diag) const {
  std::vector<SubordinationRule> rules{make_rule(s, inhomogeneous, options_)};
  std::vector<PowerDiagnostics> diags;
  auto out = evaluate(f, rules, diag ? &diags : nullptr);
  if (diag) *diag = diags.front();
  return std::move(out.front());
}

std::vector<GridFunction> FractionalCalculus::powers(const GridFunction& f,
                                                     const std::vector<std::pair<double, bool>>& requests) const {
  std::vector<SubordinationRule> rules;
  for (const auto& [s, inhomogeneous] : requests) rules.push_back(make_rule(s, inhomogeneous, options_));
  return evaluate(f, rules, nullptr);
}

SobolevNormReport FractionalCalculus::sobolev_norm(const GridFunction& f, double s, double p) const {
  SobolevNormReport r;
  r.s = s;
  r.p = p;
  r.lp = lp_norm(f, p);
  if (s == 0.0) {
    r.homogeneous = r.inhomogeneous = r.lp;
  } else {
    const auto v = powers(f, {{s / 2.0, false}, {s / 2.0, true}});
    r.homogeneous = lp_norm(v[0], p);
    r.inhomogeneous = lp_norm(v[1], p);
  }
  r.surrogate = r.lp + r.homogeneous;
  r.equivalence_ratio = r.surrogate > 0.0 ? r.inhomogeneous / r.surrogate : 1.0;
  return r;
}

double FractionalCalculus::homogeneous_norm(const GridFunction& f, double s, double p) const {
  if (s == 0.0) return lp_norm(f, p);
  return lp_norm(power(f, s / 2.0, false), p);
}

double FractionalCalculus::inhomogeneous_norm(const GridFunction& f, double s, double p) const {
  if (s == 0.0) return lp_norm(f, p);
  return lp_norm(power(f, s / 2.0, true), p);
}

GridFunction FractionalCalculus::semigroup(const GridFunction& f, double t) const {
  return std::move(semigroups(f, {t}).front());
}

std::vector<GridFunction> FractionalCalculus::semigroups(const GridFunction& f,
                                                         const std::vector<double>& times) const {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || (i > 0 && times[i] < times[i - 1])) {
      throw std::invalid_argument("semigroup times must be non-negative and increasing");
    }
  }
  if (backend_ == SemigroupBackend::krylov) {
    std::vector<std::function<double(double)>> phis;
    for (double t : times) phis.push_back([t](double x) { return std::exp(-t * x); });
    return lanczos_apply(*op_, f, phis, options_.krylov_tol).values;
  }
  HeatPropagator heat(op_, sweep_config_);
  std::vector<GridFunction> out;
  GridFunction u = f;
  double now = 0.0;
  for (double t : times) {
    if (t > now) {
      const auto n = static_cast<std::size_t>(std::ceil((t - now) / heat.dt() - 1e-9));
      heat.advance(u.values(), (t - now) / static_cast<double>(n), n);
      now = t;
    }
    out.push_back(u);
  }
  return out;
}

GridFunction dilated(const GroupSpec& g, GridPtr grid, const TestFunction& f, double lambda) {
  return GridFunction::sample(std::move(grid), [&](std::span<const double> x) {
    return f(dilate(g, lambda, Point<double>(x.begin(), x.end())));
  });
}

TestFunction random_bump(const GroupSpec& g, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count(1, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  struct Bump {
    Point<double> inverse_centre;
    std::vector<double> widths;
    double amplitude = 1.0;
  };
  const auto& shape = g.shape();
  const int lcm = lcm_of_weights(shape);
  std::vector<int> powers;
  for (int m = 0; m < g.dimension(); ++m) powers.push_back(2 * lcm / shape.weight(static_cast<std::size_t>(m)));
  std::vector<Bump> bumps(static_cast<std::size_t>(count(rng)));
  for (auto& b : bumps) {
    const double w = scale * (0.6 + 0.4 * unit(rng));
    Point<double> centre;
    for (int m = 0; m < g.dimension(); ++m) {
      const int k = shape.weight(static_cast<std::size_t>(m));
      centre.push_back((unit(rng) - 0.5) * 0.6 * std::pow(scale, k));
      b.widths.push_back(std::pow(w, k));
    }
    b.inverse_centre = inverse(g, centre);
    b.amplitude = 0.5 + unit(rng);
  }
  auto group = std::make_shared<const GroupSpec>(g);
  return [group, bumps, powers](std::span<const double> x) {
    const Point<double> p(x.begin(), x.end());
    double sum = 0.0;
    for (const auto& b : bumps) {
      const auto y = compose(*group, b.inverse_centre, p);
      double q = 0.0;
      for (std::size_t m = 0; m < y.size(); ++m) q += std::pow(y[m] / b.widths[m], powers[m]);
      sum += b.amplitude * std::exp(-q);
    }
    return sum;
  };
}

void write_estimates_csv(std::ostream& out, const std::vector<EstimateRow>& rows) {
  out << "check,params,value,bound,pass\n";
  for (const auto& r : rows) {
    out << r.check << ',';
    for (std::size_t i = 0; i < r.params.size(); ++i) {
      if (i) out << ';';
      out << r.params[i].first << '=' << format_double(r.params[i].second);
    }
    out << ',' << format_double(r.value) << ',' << format_double(r.bound) << ',' << (r.pass ? 1 : 0) << '\n';
  }
}

FamilyResult embedding_check(const GroupSpec& g, const FractionalCalculus& calc, double p, double q, double b,
                             const TestFunction& f, const std::vector<double>& lambdas) {
  if (!(p > 1.0 && q > p)) throw std::invalid_argument("embedding check: need 1 < p < q");
  const int N = g.homogeneous_dimension();
  const bool sup = q == kInf;
  const double a = b - N * (1.0 / p - (sup ? 0.0 : 1.0 / q));
  if (sup ? !(b > N / p) : !(a >= 0.0)) {
    throw std::invalid_argument(sup ? "embedding check: sup-norm variant needs b > N/p"
                                    : "embedding check: a = b - N(1/p - 1/q) must be non-negative");
  }
  std::vector<Ratio> parts;
  for (double lambda : lambdas) {
    const auto u = dilated(g, calc.op().grid_ptr(), f, lambda);
    const auto v = calc.powers(u, {{a / 2.0, true}, {b / 2.0, true}});
    parts.push_back({sup ? lp_norm(u, kInf) : lp_norm(v[0], q), lp_norm(v[1], p)});
  }
  return finish_family(lambdas, parts, "embedding check");
}

double GnParams::r() const { return 1.0 / (theta / p + (1.0 - theta) / q); }

FamilyResult gn_check(const GroupSpec& g, const FractionalCalculus& calc, const GnParams& params,
                      const TestFunction& f, const std::vector<double>& lambdas) {
  if (!(params.theta > 0.0 && params.theta <= 1.0) || !(params.alpha >= 0.0) || !(params.p >= 1.0) ||
      !(params.q >= 1.0)) {
    throw std::invalid_argument("GN check: need 0 < theta <= 1, alpha >= 0, p, q >= 1");
  }
  const double r = params.r();
  std::vector<Ratio> parts;
  for (double lambda : lambdas) {
    const auto u = dilated(g, calc.op().grid_ptr(), f, lambda);
    const auto v = calc.powers(u, {{params.gamma() / 2.0, false}, {params.alpha / 2.0, false}});
    const double den = std::pow(lp_norm(v[1], params.p), params.theta) *
                       (params.theta < 1.0 ? std::pow(lp_norm(u, params.q), 1.0 - params.theta) : 1.0);
    parts.push_back({lp_norm(v[0], r), den});
  }
  return finish_family(lambdas, parts, "GN check");
}

double leibniz_ratio(const FractionalCalculus& calc, const LeibnizParams& params, const GridFunction& f,
                     const GridFunction& h) {
  const double inv = 1.0 / params.r;
  if (std::abs(inv - 1.0 / params.p1 - 1.0 / params.q1) > 1e-12 ||
      std::abs(inv - 1.0 / params.p2 - 1.0 / params.q2) > 1e-12) {
    throw std::invalid_argument("Leibniz check: need 1/r = 1/p_i + 1/q_i");
  }
  GridFunction fh(f.grid_ptr());
  for (std::size_t i = 0; i < f.size(); ++i) fh[i] = f[i] * h[i];
  const double s = params.s;
  const double lhs = calc.homogeneous_norm(fh, s, params.r);
  if (lhs == 0.0) return 0.0;
  double rhs = 0.0;
  if (s == 0.0) {
    rhs = lp_norm(f, params.p1) * lp_norm(h, params.q1) + lp_norm(h, params.q2) * lp_norm(f, params.p2);
  } else {
    const auto df = calc.power(f, s / 2.0, false);
    const auto dh = calc.power(h, s / 2.0, false);
    rhs = lp_norm(f, params.p1) * lp_norm(dh, params.q1) + lp_norm(h, params.q2) * lp_norm(df, params.p2);
  }
  if (rhs == 0.0) throw std::domain_error("Leibniz check: RHS underflow");
  return lhs / rhs;
}

FamilyResult leibniz_check(const GroupSpec& g, const FractionalCalculus& calc, const LeibnizParams& params,
                           const TestFunction& f, const TestFunction& h, const std::vector<double>& lambdas) {
  std::vector<Ratio> parts;
  for (double lambda : lambdas) {
    const auto fl = dilated(g, calc.op().grid_ptr(), f, lambda);
    const auto hl = dilated(g, calc.op().grid_ptr(), h, lambda);
    parts.push_back({leibniz_ratio(calc, params, fl, hl), 1.0});
  }
  return finish_family(lambdas, parts, "Leibniz check");
}

FamilyResult chain_rule_check(const GroupSpec& g, const FractionalCalculus& calc, const Nonlinearity& F,
                              const ChainRuleParams& params, const TestFunction& u,
                              const std::vector<double>& lambdas) {
  const double alpha = F.alpha();
  if (std::abs(1.0 / params.p - (alpha - 1.0) / params.r - 1.0 / params.q) > 1e-12) {
    throw std::invalid_argument("chain rule check: need 1/p = (alpha-1)/r + 1/q");
  }
  if (!(params.delta >= 0.0 && params.delta <= F.order())) {
    throw std::invalid_argument("chain rule check: need 0 <= delta <= floor(alpha)");
  }
  std::vector<Ratio> parts;
  for (double lambda : lambdas) {
    const auto ul = dilated(g, calc.op().grid_ptr(), u, lambda);
    const auto Fu = F.apply(ul);
    const double lhs = calc.homogeneous_norm(Fu, params.delta, params.p);
    const double rhs = std::pow(lp_norm(ul, params.r), alpha - 1.0) * calc.homogeneous_norm(ul, params.delta, params.q);
    parts.push_back({lhs, rhs});
  }
  return finish_family(lambdas, parts, "chain rule check");
}

FamilyResult theorem2_check(const GroupSpec& g, const FractionalCalculus& calc, const Nonlinearity& F, double p,
                            double s, const TestFunction& u, const std::vector<double>& lambdas) {
  const int N = g.homogeneous_dimension();
  const double alpha = F.alpha();
  const auto params = classify(g.name(), N, alpha, p, s);
  std::vector<std::string> failed;
  if (!(s > N / p - N / alpha)) failed.push_back("s > N/p - N/alpha fails");
  if (!(s < N / p)) failed.push_back("s < N/p fails");
  if (!(s >= 0.0)) failed.push_back("s >= 0 fails");
  if (params.regime == Regime::invalid) {
    for (const auto& r : params.reasons) {
      if (std::find(failed.begin(), failed.end(), r) == failed.end()) failed.push_back(r);
    }
    if (failed.empty()) failed.push_back("no regime");
  }
  if (!failed.empty()) {
    std::string msg = "theorem 2 check:";
    for (const auto& f : failed) msg += " " + f + ";";
    msg.pop_back();
    throw RegimeError(msg);
  }
  std::vector<Ratio> parts;
  for (double lambda : lambdas) {
    const auto ul = dilated(g, calc.op().grid_ptr(), u, lambda);
    const double lhs = calc.inhomogeneous_norm(F.apply(ul), params.s_alpha, p);
    const double rhs = std::pow(calc.inhomogeneous_norm(ul, s, p), alpha);
    parts.push_back({lhs, rhs});
  }
  return finish_family(lambdas, parts, "theorem 2 check");
}

SquareFunctionResult lp_square_function(const FractionalCalculus& calc, const GridFunction& f, double p, int j_min,
                                        int j_max, double window) {
  const double dt = calc.op().time_step(PropagatorConfig{}.safety);
  if (j_min > j_max || std::pow(4.0, -j_max) < 4.0 * dt || std::pow(4.0, 1 - j_min) > window) {
    std::ostringstream msg;
    msg << "square function: j-range [" << j_min << ", " << j_max << "] unresolvable (dt " << dt << ", window "
        << window << ")";
    throw std::domain_error(msg.str());
  }
  std::vector<double> times;
  for (int j = j_max; j >= j_min - 1; --j) times.push_back(std::pow(4.0, -j));
  const auto e = calc.semigroups(f, times);
  GridFunction square(f.grid_ptr());
  for (std::size_t k = 0; k + 1 < e.size(); ++k) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double d = e[k][i] - e[k + 1][i];
      square[i] += d * d;
    }
  }
  for (std::size_t i = 0; i < f.size(); ++i) square[i] = std::sqrt(square[i]);
  SquareFunctionResult out;
  out.j_min = j_min;
  out.j_max = j_max;
  out.square_norm = lp_norm(square, p);
  out.lp = lp_norm(f, p);
  out.ratio = out.lp > 0.0 ? out.square_norm / out.lp : 0.0;
  return out;
}

SlopeFit sobolev_smoothing_rate(const GroupSpec& g, const FractionalCalculus& calc, double s, double theta, double p,
                                const std::vector<double>& times, const TestFunction& f,
                                const std::vector<double>& lambdas) {
  if (times.size() < 3) throw std::invalid_argument("sobolev smoothing: need at least 3 times");
  std::vector<double> envelope(times.size(), 0.0);
  for (double lambda : lambdas) {
    const auto u = dilated(g, calc.op().grid_ptr(), f, lambda);
    const double base = calc.inhomogeneous_norm(u, s, p);
    if (!(base > 0.0)) throw std::domain_error("sobolev smoothing: norm underflow");
    const auto evolved = calc.semigroups(u, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
      envelope[k] = std::max(envelope[k], calc.inhomogeneous_norm(evolved[k], s + theta, p) / base);
    }
  }
  std::vector<double> x, y;
  for (std::size_t k = 0; k < times.size(); ++k) {
    x.push_back(std::log(times[k]));
    y.push_back(std::log(envelope[k]));
  }
  return fit_line(x, y);
}

}  // namespace carnot
