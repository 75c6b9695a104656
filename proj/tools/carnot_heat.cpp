#include "carnot/field_calculus.hpp"
#include "carnot/grid_analysis.hpp"
#include "carnot/group_dsl.hpp"
#include "carnot/heat.hpp"
#include "carnot/mild.hpp"
#include "carnot/sobolev.hpp"
#include "support.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <random>

using namespace carnot;
using namespace carnot::cli;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

struct Common {
  std::string group = "heisenberg";
  int grid = 33;
  double R = 4.0;
  double safety = 0.5;
  std::string out = "carnot_out";
  std::uint64_t seed = 1;
};

void add_common(CLI::App* sub, Common& c, bool with_grid = true) {
  sub->add_option("--group", c.group, "builtin name or .group file")->capture_default_str();
  if (with_grid) {
    sub->add_option("--grid", c.grid, "points per axis (odd)")->capture_default_str();
    sub->add_option("--R", c.R, "box half width")->capture_default_str();
    sub->add_option("--safety", c.safety, "step safety factor")->capture_default_str();
  }
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  sub->add_option("--seed", c.seed, "seed for random test data")->capture_default_str();
}

bool is_file_reference(const std::string& ref) {
  return ref.find('/') != std::string::npos || (ref.size() > 6 && ref.ends_with(".group"));
}

PropagatorConfig propagator(const Common& c) {
  PropagatorConfig cfg;
  cfg.safety = c.safety;
  return cfg;
}

GridPtr make_grid(const GroupSpec& g, const Common& c) { return Grid::uniform(g.shape(), c.R, c.grid); }

std::string names_of(const std::vector<std::pair<std::string, double>>& params) {
  std::string s;
  for (const auto& [k, v] : params) s += (s.empty() ? "" : ";") + k + "=" + format_double(v);
  return s;
}


struct ParamsOptions {
  Common c;
  double p = 2.0, alpha = 2.0, s = 0.0;
};

void report_params(const ProblemParams& P, Summary& sum) {
  sum.info("group", P.group);
  sum.info("N", P.N);
  sum.info("alpha", P.alpha);
  sum.info("p", P.p);
  sum.info("s", P.s);
  sum.info("s_c", P.s_c);
  sum.info("s_alpha", P.s_alpha);
  sum.info("p_tilde", P.p_tilde);
  sum.info("beta", P.beta);
  sum.info("B", P.B);
  std::string reasons;
  for (const auto& r : P.reasons) reasons += (reasons.empty() ? "" : "; ") + r;
  sum.info("reasons", reasons.empty() ? "-" : reasons);
}

int run_params(const ParamsOptions& o) {
  auto g = resolve_group(o.c.group);
  auto P = classify(g.name(), g.homogeneous_dimension(), o.alpha, o.p, o.s);
  Summary sum;
  report_params(P, sum);
  sum.check("regime", to_string(P.regime), "N1 or N2", P.regime != Regime::invalid);
  sum.print();
  sum.write(prepare_dir(o.c.out));
  return sum.pass() ? 0 : 1;
}


int run_verify(const Common& c) {
  const auto dir = prepare_dir(c.out);
  Summary sum;
  std::optional<GroupSpec> g;
  if (is_file_reference(c.group)) {
    auto src = load_group_file(c.group);
    auto parsed = parse_group(src);
    for (const auto& d : parsed.diagnostics) std::cout << d.to_string(src.provenance) << '\n';
    const int errors = static_cast<int>(std::count_if(parsed.diagnostics.begin(), parsed.diagnostics.end(), [](const auto& d) {
      return d.severity == ParseDiagnostic::Severity::error;
    }));
    sum.check("parse_errors", errors, "0", parsed.ok() && errors == 0);
    if (parsed.ok()) {
      try {
        g.emplace(parsed.name.value_or(c.group), *parsed.law);
      } catch (const std::exception& e) {
        std::cout << c.group << ": " << e.what() << '\n';
        sum.check("group", std::string("rejected"), "valid", false);
      }
    }
  } else {
    g.emplace(builtin_group(c.group));
  }
  if (g) {
    const auto report = validate_group_law(g->law());
    std::ofstream csv(dir / "validation.csv");
    csv << "axiom,passed,detail\n";
    for (const auto& e : report.entries) {
      csv << e.axiom << ',' << (e.passed ? 1 : 0) << ",\"" << e.detail << "\"\n";
      sum.check("axiom:" + e.axiom, e.passed ? "holds" : e.detail, "holds", e.passed);
    }
    const auto rank = hormander_rank(*g);
    sum.info("dimension", g->dimension());
    sum.info("homogeneous_dimension", g->homogeneous_dimension());
    sum.info("step", g->step());
    sum.check("hormander_rank", rank.rank, std::to_string(g->dimension()), rank.rank == g->dimension());
    sum.check("bracket_step", rank.achieved_step, std::to_string(g->step()), rank.achieved_step == g->step());
  }
  sum.print();
  sum.write(dir);
  return sum.pass() ? 0 : 1;
}


int run_fields(const Common& c) {
  const auto dir = prepare_dir(c.out);
  auto g = resolve_group(c.group);
  const auto names = default_coordinate_names(static_cast<std::size_t>(g.dimension()));
  std::ofstream fields(dir / "fields.csv");
  fields << "field,coordinate,coefficient\n";
  std::cout << g.name() << ": left-invariant fields\n";
  for (std::size_t i = 0; i < g.fields().size(); ++i) {
    const auto& X = g.fields()[i];
    std::cout << "  X" << i + 1 << " = " << X.to_string(names) << '\n';
    for (std::size_t m = 0; m < X.dimension(); ++m) {
      if (X.coefficient(m).is_zero()) continue;
      fields << "X" << i + 1 << ',' << names[m] << ",\"" << X.coefficient(m).to_string(names) << "\"\n";
    }
  }
  std::ofstream brackets(dir / "brackets.csv");
  brackets << "a,b,bracket,in_basis\n";
  bool closed = true;
  for (const auto& e : bracket_table(g.fields())) {
    if (e.value.is_zero()) continue;
    const auto coeffs = express_in_basis(e.value, g.fields());
    std::string combo;
    if (coeffs) {
      for (std::size_t k = 0; k < coeffs->size(); ++k) {
        if ((*coeffs)[k] == 0) continue;
        combo += (combo.empty() ? "" : " + ") + to_string((*coeffs)[k]) + " X" + std::to_string(k + 1);
      }
    }
    closed = closed && coeffs.has_value();
    std::cout << "  [X" << e.a + 1 << ",X" << e.b + 1 << "] = " << (coeffs ? combo : e.value.to_string(names)) << '\n';
    brackets << "X" << e.a + 1 << ",X" << e.b + 1 << ",\"" << e.value.to_string(names) << "\",\"" << combo << "\"\n";
  }
  const auto symbol = sublaplacian(g);
  const auto rank = hormander_rank(g);
  Summary sum;
  sum.check("bracket_closure", closed ? "constant" : "variable", "constant", closed);
  sum.check("hormander_rank", rank.rank, std::to_string(g.dimension()), rank.rank == g.dimension());
  sum.check("sublaplacian_homogeneity", symbol.homogeneity_verified ? "holds" : "fails", "holds",
            symbol.homogeneity_verified);
  sum.print();
  sum.write(dir);
  return sum.pass() ? 0 : 1;
}


struct HeatOptions {
  Common c;
  std::vector<double> times{0.1, 0.25, 0.5};
  std::string init = "delta";
  double amplitude = 1.0, width = 1.0;
  bool snapshot = false;
};

int run_heat(const HeatOptions& o) {
  const auto dir = prepare_dir(o.c.out);
  auto g = resolve_group(o.c.group);
  auto grid = make_grid(g, o.c);
  HeatPropagator heat(g, grid, propagator(o.c));
  auto u0 = initial_data(g, grid, o.init, o.amplitude, o.width, o.c.seed);
  std::vector<MetricsRow> metrics;
  auto snaps = heat.evolve_to(u0, o.times, &metrics);
  {
    std::ofstream out(dir / "metrics.csv");
    write_metrics_csv(out, metrics);
  }
  if (o.snapshot) {
    std::ofstream out(dir / "snapshot.csv");
    write_csv(out, snaps.back(), g.name());
  }
  Summary sum;
  sum.info("dt", heat.dt());
  const double m0 = metrics.front().mass;
  double drift = 0.0;
  for (const auto& row : metrics) {
    if (row.shell_mass < 1e-3 * std::abs(m0)) drift = std::max(drift, std::abs(row.mass - m0));
  }
  sum.check("mass_drift", drift / std::max(std::abs(m0), 1e-300), "<= 1e-3", drift <= 1e-3 * std::abs(m0));
  const bool euclid = g.step() == 1;
  if (euclid && o.init == "delta") {
    const double n = g.dimension();
    for (std::size_t k = 0; k < snaps.size(); ++k) {
      const double t = o.times[k];
      const auto mask = bulk_mask(snaps[k]);
      double worst = 0.0, top = 0.0;
      for (std::size_t p = 0; p < grid->size(); ++p) {
        if (!mask[p]) continue;
        const auto x = grid->coordinates(p);
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        const double exact = std::exp(-r2 / (4.0 * t)) / std::pow(4.0 * std::numbers::pi * t, n / 2.0);
        worst = std::max(worst, std::abs(snaps[k][p] - exact));
        top = std::max(top, exact);
      }
      sum.check("gaussian_error(t=" + format_double(t) + ")", worst / top, "<= 0.02", worst / top <= 0.02);
    }
  }
  sum.print();
  sum.write(dir);
  return sum.pass() ? 0 : 1;
}


struct KernelOptions {
  Common c;
  std::vector<double> times{0.5, 0.707, 1.0, 1.414, 2.0, 2.83, 4.0};
  double settled = 1.0;
};

int run_kernel(const KernelOptions& o) {
  const auto dir = prepare_dir(o.c.out);
  auto g = resolve_group(o.c.group);
  auto probe = kernel_probe(g, make_grid(g, o.c), o.times, propagator(o.c));
  {
    std::ofstream out(dir / "metrics.csv");
    write_metrics_csv(out, probe.metrics);
  }
  const auto laws = kernel_laws(g, probe, o.settled);
  {
    std::ofstream out(dir / "kernel.csv");
    out << "t,symmetry,min_over_max\n";
    for (std::size_t k = 0; k < laws.times.size(); ++k) {
      const auto& h = probe.snapshots[k].h;
      out << format_double(laws.times[k]) << ',' << format_double(laws.symmetry[k]) << ','
          << format_double(h.min() / h.max()) << '\n';
    }
    std::ofstream pairs(dir / "scaling.csv");
    pairs << "t,t4,error\n";
    for (const auto& p : laws.pairs) pairs << format_double(p.early) << ',' << format_double(p.late) << ',' << format_double(p.error) << '\n';
  }
  Summary sum;
  sum.info("dt", probe.dt);
  sum.check("mass_min", laws.mass_min, ">= 0.99", laws.mass_min >= 0.99);
  sum.check("mass_max", laws.mass_max, "<= 1.001", laws.mass_max <= 1.001);
  sum.check("min_over_max", laws.min_ratio, ">= -1e-8", laws.positivity_ok);
  sum.check("symmetry(t>=" + format_double(o.settled) + ")", laws.symmetry_max, "<= 0.05", laws.symmetry_ok);
  sum.check("scaling(t>=" + format_double(o.settled) + ")", laws.scaling_max, "<= 0.05", laws.scaling_ok);
  for (const auto& p : laws.pairs) sum.info("scaling " + format_double(p.early) + "->" + format_double(p.late), p.error);
  try {
    const auto fit = gaussian_bound_diagnostic(g, probe);
    sum.info("gaussian_bound_b", fit.b);
    sum.info("gaussian_bound_violation_rate", fit.violation_rate);
  } catch (const std::domain_error& e) {
    sum.info("gaussian_bound", e.what());
  }
  sum.print();
  sum.write(dir);
  return sum.pass() ? 0 : 1;
}


struct SmoothingOptions {
  Common c;
  std::vector<double> times{0.5, 0.707, 1.0, 1.414, 2.0};
  std::vector<std::string> betas{"2", "inf"};
};

int run_smoothing(const SmoothingOptions& o) {
  const auto dir = prepare_dir(o.c.out);
  auto g = resolve_group(o.c.group);
  std::vector<double> betas;
  for (const auto& b : o.betas) betas.push_back(parse_exponent(b));
  auto probe = kernel_probe(g, make_grid(g, o.c), o.times, propagator(o.c));
  Summary sum;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const auto fit = smoothing_rate(probe, betas[i]);
    const double expected = expected_smoothing_slope(g.homogeneous_dimension(), betas[i]);
    const std::string tag = "beta_" + o.betas[i];
    std::ofstream curve(dir / ("smoothing_" + tag + ".csv"));
    curve << "log_t,log_norm\n";
    for (std::size_t k = 0; k < fit.x.size(); ++k) curve << format_double(fit.x[k]) << ',' << format_double(fit.y[k]) << '\n';
    std::ofstream line(dir / ("smoothing_" + tag + "_fit.csv"));
    line << "log_t,fitted\n";
    for (double x : fit.x) line << format_double(x) << ',' << format_double(fit.intercept + fit.slope * x) << '\n';
    const bool ok = std::abs(fit.slope - expected) <= 0.1 * std::abs(expected);
    sum.check("slope(" + tag + ")", fit.slope, format_double(expected) + " +-10%", ok);
  }
  sum.print();
  sum.write(dir);
  return sum.pass() ? 0 : 1;
}


struct SobolevOptions {
  Common c;
  double s = 1.0, p = 2.0;
  std::string init = "bump";
  double amplitude = 1.0, width = 1.0, lambda = 1.0;
  std::string backend = "krylov";
  QuadratureOptions quad;
};

SemigroupBackend parse_backend(const std::string& b) {
  if (b == "krylov") return SemigroupBackend::krylov;
  if (b == "sweep") return SemigroupBackend::sweep;
  throw UsageError("unknown backend '" + b + "' (krylov, sweep)");
}

int run_sobolev(const SobolevOptions& o) {
  const auto dir = prepare_dir(o.c.out);
  auto g = resolve_group(o.c.group);
  auto grid = make_grid(g, o.c);
  FractionalCalculus calc(std::make_shared<const DiscreteSublaplacian>(g, grid), o.quad, parse_backend(o.backend),
                          propagator(o.c));
  GridFunction f;
  if (o.init == "bump") {
    f = dilated(g, grid, random_bump(g, o.c.seed, o.width), o.lambda);
    f *= o.amplitude;
  } else if (o.init == "gaussian") {
    f = dilated(g, grid, homogeneous_gaussian(g, o.width), o.lambda);
    f *= o.amplitude;
  } else {
    throw UsageError("sobolev: --init must be bump or gaussian");
  }
  const auto rep = calc.sobolev_norm(f, o.s, o.p);
  PowerDiagnostics diag;
  const auto up = calc.power(f, o.s, true, &diag);
  const auto back = calc.power(up, -o.s, true);
  const double roundtrip = lp_norm(back - f, 2.0) / lp_norm(f, 2.0);
  {
    std::ofstream out(dir / "sobolev.csv");
    out << "s,p,lp,homogeneous,inhomogeneous,surrogate,equivalence_ratio,roundtrip\n";
    out << format_double(o.s) << ',' << format_double(o.p) << ',' << format_double(rep.lp) << ','
        << format_double(rep.homogeneous) << ',' << format_double(rep.inhomogeneous) << ','
        << format_double(rep.surrogate) << ',' << format_double(rep.equivalence_ratio) << ','
        << format_double(roundtrip) << '\n';
  }
  Summary sum;
  sum.info("lp", rep.lp);
  sum.info("homogeneous", rep.homogeneous);
  sum.info("inhomogeneous", rep.inhomogeneous);
  sum.info("first_node_share", diag.first_node_share);
  sum.info("last_node_share", diag.last_node_share);
  if (diag.range_warning) std::cout << "warning: quadrature range carries more than 1% of the norm\n";
  sum.check("roundtrip", roundtrip, "<= 0.05", roundtrip <= 0.05);
  sum.check("equivalence_ratio", rep.equivalence_ratio, "[1/3, 3]",
            rep.equivalence_ratio >= 1.0 / 3.0 && rep.equivalence_ratio <= 3.0);
  sum.print();
  sum.write(dir);
  return sum.pass() ? 0 : 1;
}


struct EstimateOptions {
  Common c;
  std::string check;
  int seeds = 10;
  std::vector<double> lambdas{0.5, 1.0, 2.0};
  double scale = 0.5;
  double limit = 2.0;
  std::optional<double> p, q, b, order, theta, s, r, p1, q1, p2, q2, delta, alpha;
  std::string nonlinearity = "signed";
  int j_min = -2, j_max = 3;
  double window = 64.0;
};

template <typename T>
T pick(const std::optional<T>& v, T fallback) {
  return v ? *v : fallback;
}

int run_estimate(EstimateOptions o) {
  const auto dir = prepare_dir(o.c.out);
  auto g = resolve_group(o.c.group);
  auto grid = make_grid(g, o.c);
  FractionalCalculus calc(std::make_shared<const DiscreteSublaplacian>(g, grid));
  const double N = g.homogeneous_dimension();
  const auto F = Nonlinearity(parse_nonlinearity(o.nonlinearity), pick(o.alpha, 2.0));
  std::vector<std::pair<std::string, double>> params;
  Summary sum;

  std::function<FamilyResult(const TestFunction&, std::uint64_t)> family;
  if (o.check == "embedding") {
    const double p = pick(o.p, 2.0), q = o.q ? *o.q : 2.0 * p;
    const double b = pick(o.b, std::isinf(q) ? N / p + 0.5 : N * (1.0 / p - 1.0 / q));
    params = {{"p", p}, {"q", q}, {"b", b}};
    family = [&, p, q, b](const TestFunction& f, std::uint64_t) { return embedding_check(g, calc, p, q, b, f, o.lambdas); };
  } else if (o.check == "gn") {
    GnParams gp;
    gp.alpha = pick(o.order, 1.0);
    gp.p = pick(o.p, 2.0);
    gp.q = pick(o.q, 2.0);
    gp.theta = pick(o.theta, 0.5);
    params = {{"alpha", gp.alpha}, {"p", gp.p}, {"q", gp.q}, {"theta", gp.theta}, {"r", gp.r()}};
    family = [&, gp](const TestFunction& f, std::uint64_t) { return gn_check(g, calc, gp, f, o.lambdas); };
  } else if (o.check == "leibniz") {
    LeibnizParams lp;
    lp.s = pick(o.s, lp.s);
    lp.r = pick(o.r, lp.r);
    lp.p1 = pick(o.p1, lp.p1);
    lp.q1 = pick(o.q1, lp.q1);
    lp.p2 = pick(o.p2, lp.p2);
    lp.q2 = pick(o.q2, lp.q2);
    params = {{"s", lp.s}, {"r", lp.r}, {"p1", lp.p1}, {"q1", lp.q1}, {"p2", lp.p2}, {"q2", lp.q2}};
    family = [&, lp](const TestFunction& f, std::uint64_t seed) {
      return leibniz_check(g, calc, lp, f, random_bump(g, seed + 1000003, o.scale), o.lambdas);
    };
  } else if (o.check == "chainrule") {
    ChainRuleParams cp;
    cp.delta = pick(o.delta, cp.delta);
    cp.p = pick(o.p, cp.p);
    cp.q = pick(o.q, cp.q);
    cp.r = pick(o.r, cp.r);
    params = {{"alpha", F.alpha()}, {"delta", cp.delta}, {"p", cp.p}, {"q", cp.q}, {"r", cp.r}};
    family = [&, cp](const TestFunction& f, std::uint64_t) { return chain_rule_check(g, calc, F, cp, f, o.lambdas); };
  } else if (o.check == "theorem2") {
    const double p = pick(o.p, 2.0), s = pick(o.s, 1.0);
    const auto P = classify(g.name(), g.homogeneous_dimension(), F.alpha(), p, s);
    sum.info("s_alpha", P.s_alpha);
    sum.info("regime", to_string(P.regime));
    params = {{"alpha", F.alpha()}, {"p", p}, {"s", s}};
    family = [&, p, s](const TestFunction& f, std::uint64_t) { return theorem2_check(g, calc, F, p, s, f, o.lambdas); };
  } else if (o.check == "lp-square") {
    const double p = pick(o.p, 2.0);
    params = {{"p", p}, {"j_min", static_cast<double>(o.j_min)}, {"j_max", static_cast<double>(o.j_max)}};
    family = [&, p](const TestFunction& f, std::uint64_t) {
      FamilyResult res;
      res.lambdas = o.lambdas;
      for (double l : o.lambdas) {
        res.ratios.push_back(lp_square_function(calc, dilated(g, grid, f, l), p, o.j_min, o.j_max, o.window).ratio);
      }
      return res;
    };
  } else if (o.check == "maximal") {
    const double p = pick(o.p, 2.0);
    params = {{"p", p}};
    family = [&, p](const TestFunction& f, std::uint64_t) {
      FamilyResult res;
      res.lambdas = o.lambdas;
      for (double l : o.lambdas) {
        const auto u = dilated(g, grid, f, l);
        const auto m = maximal(g, u);
        for (std::size_t i = 0; i < u.size(); ++i) {
          if (m[i] < std::abs(u[i]) * (1.0 - 1e-12)) throw std::logic_error("maximal function below |f|");
        }
        res.ratios.push_back(lp_norm(m, p) / lp_norm(u, p));
      }
      return res;
    };
  } else {
    throw UsageError("estimate: unknown check '" + o.check + "'");
  }

  if (o.seeds < 1) throw UsageError("estimate: --seeds must be positive");
  std::vector<FamilyResult> results(static_cast<std::size_t>(o.seeds));
  run_pool(results.size(), thread_budget(), [&](std::size_t i) {
    const std::uint64_t seed = o.c.seed + i;
    results[i] = family(random_bump(g, seed, o.scale), seed);
  });

  std::vector<EstimateRow> rows;
  double worst = 0.0;
  bool finite = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    auto& res = results[i];
    if (res.ratios.size() == res.lambdas.size() && res.max_ratio == 0.0 && !res.ratios.empty()) {
      const auto [lo, hi] = std::minmax_element(res.ratios.begin(), res.ratios.end());
      res.max_ratio = *hi;
      res.spread = *hi / *lo;
      res.finite = std::isfinite(res.spread);
    }
    auto row_params = params;
    row_params.emplace_back("seed", static_cast<double>(o.c.seed + i));
    row_params.emplace_back("max_ratio", res.max_ratio);
    const bool ok = res.skipped || (res.finite && res.spread <= o.limit);
    rows.push_back({o.check, row_params, res.spread, o.limit, ok});
    if (!res.skipped) worst = std::max(worst, res.spread);
    finite = finite && (res.skipped || res.finite);
  }
  {
    std::ofstream out(dir / "estimates.csv");
    write_estimates_csv(out, rows);
  }
  sum.info("params", names_of(params));
  sum.check("all_finite", finite ? "yes" : "no", "yes", finite);
  sum.check("max_spread", worst, "<= " + format_double(o.limit), finite && worst <= o.limit);
  sum.print();
  sum.write(dir);
  return sum.pass() ? 0 : 1;
}


struct SolveOptions {
  Common c;
  double p = 2.0, alpha = 2.0, s = 1.0;
  std::string nonlinearity = "signed";
  std::string method = "picard";
  std::string init = "bump";
  double amplitude = 0.2, width = 1.0;
  std::optional<double> T;
  double T_cap = 1.0;
  int checkpoints = 64;
  double tol = 1e-6;
  int max_iter = 30;
  int norm_stride = 8;
  double perturb = 0.0;
  double lambda = 2.0;
};

struct Setup {
  GroupSpec g;
  GridPtr grid;
  std::unique_ptr<FractionalCalculus> calc;
  ProblemParams P;
  SolverConfig cfg;
  GridFunction u0;
};

Setup setup_run(const SolveOptions& o) {
  auto g = resolve_group(o.c.group);
  auto grid = make_grid(g, o.c);
  auto calc = std::make_unique<FractionalCalculus>(std::make_shared<const DiscreteSublaplacian>(g, grid));
  auto P = classify(g.name(), g.homogeneous_dimension(), o.alpha, o.p, o.s);
  SolverConfig cfg;
  cfg.params = P;
  const auto kind = parse_nonlinearity(o.nonlinearity);
  cfg.F = Nonlinearity(kind, o.alpha);
  cfg.checkpoints = o.checkpoints;
  cfg.tol = o.tol;
  cfg.max_iter = o.max_iter;
  cfg.norm_stride = o.norm_stride;
  cfg.propagator = propagator(o.c);
  auto u0 = initial_data(g, grid, o.init, o.amplitude, o.width, o.c.seed);
  return {std::move(g), grid, std::move(calc), P, cfg, std::move(u0)};
}

void write_run(const std::filesystem::path& dir, const SolverRun& run) {
  std::ofstream out(dir / "run.csv");
  write_run_csv(out, run);
}

double max_rel_l2(const SolverRun& a, const SolverRun& b) {
  double worst = 0.0;
  const auto n = std::min(a.snapshots.size(), b.snapshots.size());
  for (std::size_t k = 1; k < n; ++k) {
    worst = std::max(worst, lp_norm(a.snapshots[k] - b.snapshots[k], 2.0) / lp_norm(b.snapshots[k], 2.0));
  }
  return worst;
}

int run_solve(const SolveOptions& o) {
  const auto dir = prepare_dir(o.c.out);
  auto st = setup_run(o);
  auto& P = st.P;
  Summary sum;
  report_params(P, sum);
  sum.info("regime", to_string(P.regime));
  const bool picard = o.method == "picard" || o.method == "both";
  if (!picard && o.method != "direct") throw UsageError("solve: --method must be picard, direct or both");
  if (picard && P.regime == Regime::invalid) {
    sum.print();
    throw UsageError("solve: parameters are outside N1 and N2");
  }
  if (o.T) {
    st.cfg.T = *o.T;
  } else {
    std::vector<TestFunction> family;
    for (std::uint64_t k = 0; k < 3; ++k) family.push_back(random_bump(st.g, o.c.seed + 100 + k));
    const auto cal = calibrate_constants(st.g, *st.calc, P, family, {0.5, 1.0, 2.0}, {0.05, 0.1, 0.2, 0.4});
    const double norm = st.calc->inhomogeneous_norm(st.u0, P.s, P.p);
    const double T0 = admissible_T0(P, norm, cal.M, cal.C);
    sum.info("M", cal.M);
    sum.info("C", cal.C);
    sum.info("u0_norm", norm);
    sum.info("T0", T0);
    st.cfg.T = std::min(T0, o.T_cap);
  }
  sum.info("T", st.cfg.T);

  std::optional<SolverRun> pr, dr;
  if (picard) {
    pr = picard_solve(*st.calc, st.u0, st.cfg);
    double worst = 0.0;
    for (double r : pr->contraction_ratios) worst = std::max(worst, r);
    sum.info("iterations", pr->iterations);
    sum.check("picard_status", to_string(pr->status), "converged", pr->status == RunStatus::converged);
    if (!pr->contraction_ratios.empty()) sum.check("max_contraction_ratio", worst, "< 0.9", worst < 0.9);
    if (!pr->message.empty()) std::cout << "picard: " << pr->message << '\n';
    if (o.perturb > 0.0) {
      GridFunction noise(st.grid);
      std::mt19937_64 rng(o.c.seed);
      std::normal_distribution<double> nd;
      for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = nd(rng);
      noise *= o.perturb * lp_norm(st.u0, 2.0) / lp_norm(noise, 2.0);
      auto cfg = st.cfg;
      cfg.perturbation = noise;
      const auto again = picard_solve(*st.calc, st.u0, cfg);
      sum.check("uniqueness_diff", max_rel_l2(again, *pr), "<= 1e-3", max_rel_l2(again, *pr) <= 1e-3);
    }
  }
  if (!picard || o.method == "both") {
    dr = direct_solve(*st.calc, st.u0, st.cfg);
    sum.check("direct_status", to_string(dr->status), "completed", dr->status == RunStatus::completed);
    if (!dr->message.empty()) std::cout << "direct: " << dr->message << '\n';
  }
  if (pr && dr) sum.check("picard_vs_direct", max_rel_l2(*pr, *dr), "<= 1e-3", max_rel_l2(*pr, *dr) <= 1e-3);
  write_run(dir, pr ? *pr : *dr);
  sum.print();
  sum.write(dir);
  return sum.pass() ? 0 : 1;
}

int run_blowup(const SolveOptions& o) {
  const auto dir = prepare_dir(o.c.out);
  auto st = setup_run(o);
  st.cfg.T = o.T.value_or(2.0);
  const auto run = direct_solve(*st.calc, st.u0, st.cfg);
  write_run(dir, run);
  {
    std::ofstream out(dir / "trace.csv");
    out << "t,norm\n";
    for (const auto& [t, n] : run.trace) out << format_double(t) << ',' << format_double(n) << '\n';
  }
  const auto rep = blowup_monitor(run);
  std::cout << "blowup: " << rep.message << '\n';
  Summary sum;
  sum.info("s_c", st.P.s_c);
  sum.info("status", to_string(run.status));
  sum.info("t_star", run.t_star);
  sum.check("diverged", rep.diverged ? "yes" : "no", "yes", rep.diverged);
  if (rep.diverged) {
    sum.info("t_max", rep.t_max);
    sum.info("points", static_cast<double>(rep.points));
    sum.check("kappa", rep.kappa, ">= 0.85 * " + format_double(rep.bound), rep.pass);
    if (o.init == "constant") {
      const bool near = std::abs(rep.kappa - rep.ode_rate) <= 0.15 * rep.ode_rate;
      sum.check("kappa_vs_ode", rep.kappa, format_double(rep.ode_rate) + " +-15%", near);
    }
  }
  sum.print();
  sum.write(dir);
  return sum.pass() ? 0 : 1;
}

int run_scale(const SolveOptions& o) {
  const auto dir = prepare_dir(o.c.out);
  auto st = setup_run(o);
  if (st.cfg.F.kind() == NonlinearityKind::zero) throw UsageError("scale-check needs a power nonlinearity");
  st.cfg.T = o.T.value_or(0.5);
  const auto run = direct_solve(*st.calc, st.u0, st.cfg);
  if (run.status != RunStatus::completed) throw std::runtime_error("scale-check: base run did not complete: " + run.message);
  const auto rep = scaling_invariance_check(st.g, *st.calc, run, o.lambda);
  {
    std::ofstream out(dir / "residuals.csv");
    out << "t,residual\n";
    for (std::size_t k = 0; k < rep.times.size(); ++k) out << format_double(rep.times[k]) << ',' << format_double(rep.residuals[k]) << '\n';
  }
  Summary sum;
  sum.info("lambda", rep.lambda);
  sum.info("s_c", st.P.s_c);
  sum.check("max_residual", rep.max_residual, "<= 0.05", rep.pass);
  if (std::isfinite(rep.base_norm)) {
    const double ratio = rep.scaled_norm / rep.base_norm;
    sum.info("norm_s_c", rep.base_norm);
    sum.info("norm_s_c_scaled", rep.scaled_norm);
    sum.check("norm_ratio", ratio, "1 +-10%", std::abs(ratio - 1.0) <= 0.1);
  }
  sum.print();
  sum.write(dir);
  return sum.pass() ? 0 : 1;
}

void add_solver_options(CLI::App* sub, SolveOptions& o) {
  add_common(sub, o.c);
  sub->add_option("--p", o.p)->capture_default_str();
  sub->add_option("--alpha", o.alpha)->capture_default_str();
  sub->add_option("--s", o.s)->capture_default_str();
  sub->add_option("--nonlinearity", o.nonlinearity, "signed, absolute or zero")->capture_default_str();
  sub->add_option("--init", o.init, "delta, gaussian, bump or constant")->capture_default_str();
  sub->add_option("--amplitude", o.amplitude)->capture_default_str();
  sub->add_option("--width", o.width)->capture_default_str();
  sub->add_option("--T", o.T, "final time");
  sub->add_option("--checkpoints", o.checkpoints)->capture_default_str();
  sub->add_option("--norm-stride", o.norm_stride)->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat flow, Sobolev estimates and semilinear solvers on stratified groups", "carnot_heat"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "flat key = value file; flags override it");

  ParamsOptions params_o;
  auto* params = app.add_subcommand("params", "exponents and regime of the semilinear problem");
  add_common(params, params_o.c, false);
  params->add_option("--p", params_o.p)->capture_default_str();
  params->add_option("--alpha", params_o.alpha)->capture_default_str();
  params->add_option("--s", params_o.s)->capture_default_str();

  Common verify_o;
  auto* verify = app.add_subcommand("verify-group", "validate a group law and its fields");
  add_common(verify, verify_o, false);

  Common fields_o;
  auto* fields = app.add_subcommand("fields", "left-invariant fields, brackets, Hormander rank");
  add_common(fields, fields_o, false);

  HeatOptions heat_o;
  heat_o.c.group = "euclidean(2)";
  heat_o.c.grid = 121;
  heat_o.c.safety = 0.25;
  auto* heat = app.add_subcommand("heat", "evolve initial data and record metrics");
  add_common(heat, heat_o.c);
  heat->add_option("--times", heat_o.times)->delimiter(',')->capture_default_str();
  heat->add_option("--init", heat_o.init)->capture_default_str();
  heat->add_option("--amplitude", heat_o.amplitude)->capture_default_str();
  heat->add_option("--width", heat_o.width)->capture_default_str();
  heat->add_flag("--snapshot", heat_o.snapshot, "write the last snapshot");

  KernelOptions kernel_o;
  kernel_o.c.grid = 65;
  kernel_o.c.R = 6.0;
  auto* kernel = app.add_subcommand("kernel", "heat kernel laws from a discrete delta");
  add_common(kernel, kernel_o.c);
  kernel->add_option("--times", kernel_o.times)->delimiter(',')->capture_default_str();
  kernel->add_option("--settled", kernel_o.settled, "first time counted for symmetry and scaling")->capture_default_str();

  SmoothingOptions smooth_o;
  smooth_o.c.grid = 65;
  smooth_o.c.R = 6.0;
  auto* smooth = app.add_subcommand("smoothing", "decay exponents of ||h_t||_beta");
  add_common(smooth, smooth_o.c);
  smooth->add_option("--times", smooth_o.times)->delimiter(',')->capture_default_str();
  smooth->add_option("--beta", smooth_o.betas, "exponents, inf allowed")->delimiter(',')->capture_default_str();

  SobolevOptions sob_o;
  sob_o.c.grid = 21;
  sob_o.c.R = 3.0;
  auto* sob = app.add_subcommand("sobolev", "fractional powers and Sobolev norms");
  add_common(sob, sob_o.c);
  sob->add_option("--s", sob_o.s)->capture_default_str();
  sob->add_option("--p", sob_o.p)->capture_default_str();
  sob->add_option("--init", sob_o.init, "bump or gaussian")->capture_default_str();
  sob->add_option("--amplitude", sob_o.amplitude)->capture_default_str();
  sob->add_option("--width", sob_o.width)->capture_default_str();
  sob->add_option("--lambda", sob_o.lambda)->capture_default_str();
  sob->add_option("--backend", sob_o.backend, "krylov or sweep")->capture_default_str();
  sob->add_option("--nodes", sob_o.quad.nodes)->capture_default_str();
  sob->add_option("--nu-min", sob_o.quad.nu_min)->capture_default_str();
  sob->add_option("--nu-max", sob_o.quad.nu_max)->capture_default_str();
  sob->add_option("--exact-tails", sob_o.quad.exact_tails)->capture_default_str();
  sob->add_option("--krylov-tol", sob_o.quad.krylov_tol)->capture_default_str();

  EstimateOptions est_o;
  est_o.c.R = 2.5;
  auto* est = app.add_subcommand("estimate", "inequality suites over dilation families");
  add_common(est, est_o.c);
  est->add_option("check,--check", est_o.check, "embedding|gn|leibniz|chainrule|theorem2|lp-square|maximal")
      ->check(CLI::IsMember({"embedding", "gn", "leibniz", "chainrule", "theorem2", "lp-square", "maximal"}));
  est->add_option("--seeds", est_o.seeds, "random test functions")->capture_default_str();
  est->add_option("--lambdas", est_o.lambdas)->delimiter(',')->capture_default_str();
  est->add_option("--scale", est_o.scale, "bump scale")->capture_default_str();
  est->add_option("--limit", est_o.limit, "largest accepted spread")->capture_default_str();
  est->add_option("--p", est_o.p);
  est->add_option("--q", est_o.q);
  est->add_option("--b", est_o.b);
  est->add_option("--order", est_o.order, "smoothness in Gagliardo-Nirenberg");
  est->add_option("--theta", est_o.theta);
  est->add_option("--s", est_o.s);
  est->add_option("--r", est_o.r);
  est->add_option("--p1", est_o.p1);
  est->add_option("--q1", est_o.q1);
  est->add_option("--p2", est_o.p2);
  est->add_option("--q2", est_o.q2);
  est->add_option("--delta", est_o.delta);
  est->add_option("--alpha", est_o.alpha);
  est->add_option("--nonlinearity", est_o.nonlinearity)->capture_default_str();
  est->add_option("--j-min", est_o.j_min)->capture_default_str();
  est->add_option("--j-max", est_o.j_max)->capture_default_str();
  est->add_option("--window", est_o.window)->capture_default_str();

  SolveOptions solve_o;
  solve_o.c.grid = 17;
  solve_o.c.R = 3.0;
  auto* solve = app.add_subcommand("solve", "Picard iteration and direct stepping");
  add_solver_options(solve, solve_o);
  solve->add_option("--method", solve_o.method, "picard, direct or both")->capture_default_str();
  solve->add_option("--T-cap", solve_o.T_cap, "upper limit on the calibrated T0")->capture_default_str();
  solve->add_option("--tol", solve_o.tol)->capture_default_str();
  solve->add_option("--max-iter", solve_o.max_iter)->capture_default_str();
  solve->add_option("--perturb", solve_o.perturb, "relative noise on the first iterate")->capture_default_str();

  SolveOptions blow_o;
  blow_o.c.group = "euclidean(1)";
  blow_o.c.grid = 401;
  blow_o.c.R = 20.0;
  blow_o.p = 8.0;
  blow_o.s = 0.0;
  blow_o.init = "constant";
  blow_o.amplitude = 1.0;
  auto* blow = app.add_subcommand("blowup", "blow-up rate against the lower bound");
  add_solver_options(blow, blow_o);

  SolveOptions scale_o;
  scale_o.c.group = "euclidean(1)";
  scale_o.c.grid = 801;
  scale_o.c.R = 20.0;
  scale_o.p = 4.0;
  scale_o.s = 0.0;
  scale_o.init = "gaussian";
  scale_o.amplitude = 1.0;
  scale_o.width = 2.0;
  scale_o.checkpoints = 128;
  auto* scale = app.add_subcommand("scale-check", "scaling invariance of a stored run");
  add_solver_options(scale, scale_o);
  scale->add_option("--lambda", scale_o.lambda)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "usage error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (const int threads = thread_budget(); threads > 0) omp_set_num_threads(threads);
    CLI::App* sub = app.get_subcommands().front();
    if (!config_path.empty()) apply_config(*sub, read_config(config_path));
    if (sub == est && est_o.check.empty()) throw UsageError("estimate: missing check");
    if (sub == params) return run_params(params_o);
    if (sub == verify) return run_verify(verify_o);
    if (sub == fields) return run_fields(fields_o);
    if (sub == heat) return run_heat(heat_o);
    if (sub == kernel) return run_kernel(kernel_o);
    if (sub == smooth) return run_smoothing(smooth_o);
    if (sub == sob) return run_sobolev(sob_o);
    if (sub == est) return run_estimate(est_o);
    if (sub == solve) return run_solve(solve_o);
    if (sub == blow) return run_blowup(blow_o);
    if (sub == scale) return run_scale(scale_o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const GroupError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "outside the admissible range: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
