#include "carnot/heat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace carnot {

NumericalFault::NumericalFault(std::size_t step, double t)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << "non-finite value at step " << step << " (t = " << t << ")";
        return msg.str();
      }()),
      step_(step),
      time_(t) {}

MetricsRow measure(double t, const GridFunction& u) {
  return {t, integral(u), lp_norm(u, std::numeric_limits<double>::infinity()), lp_norm(u, 2.0), shell_integral(u)};
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << "t,mass,linf,l2,shell_mass\n";
  for (const auto& r : rows) {
    out << format_double(r.t) << ',' << format_double(r.mass) << ',' << format_double(r.linf) << ','
        << format_double(r.l2) << ',' << format_double(r.shell_mass) << '\n';
  }
}

HeatPropagator::HeatPropagator(const GroupSpec& g, GridPtr grid, PropagatorConfig config)
    : HeatPropagator(std::make_shared<const DiscreteSublaplacian>(g, std::move(grid)), config) {}

HeatPropagator::HeatPropagator(OperatorPtr op, PropagatorConfig config) : op_(std::move(op)), config_(config) {
  policy_dt_ = op_->time_step(config_.safety);
  dt_ = policy_dt_;
  if (config_.dt) {
    if (!(*config_.dt > 0.0)) throw std::invalid_argument("time step must be positive");
    if (*config_.dt > policy_dt_ * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "time step " << *config_.dt << " violates the CFL policy (at most " << policy_dt_ << ")";
      throw std::invalid_argument(msg.str());
    }
    dt_ = *config_.dt;
  }
}

void HeatPropagator::advance(std::span<double> u, double h, std::size_t steps, std::size_t first_step,
                             double t0) const {
  const std::size_t n = u.size();
  const auto count = static_cast<std::int64_t>(n);
  std::vector<double> k(n), tmp(n), acc(n);
  for (std::size_t s = 0; s < steps; ++s) {
    if (config_.integrator == Integrator::euler) {
      op_->apply(u, k);
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < count; ++i) u[static_cast<std::size_t>(i)] -= h * k[static_cast<std::size_t>(i)];
    } else {
      op_->apply(u, k);
#pragma omp parallel for schedule(static)
      for (std::int64_t si = 0; si < count; ++si) {
        const auto i = static_cast<std::size_t>(si);
        acc[i] = k[i];
        tmp[i] = u[i] - 0.5 * h * k[i];
      }
      op_->apply(tmp, k);
#pragma omp parallel for schedule(static)
      for (std::int64_t si = 0; si < count; ++si) {
        const auto i = static_cast<std::size_t>(si);
        acc[i] += 2.0 * k[i];
        tmp[i] = u[i] - 0.5 * h * k[i];
      }
      op_->apply(tmp, k);
#pragma omp parallel for schedule(static)
      for (std::int64_t si = 0; si < count; ++si) {
        const auto i = static_cast<std::size_t>(si);
        acc[i] += 2.0 * k[i];
        tmp[i] = u[i] - h * k[i];
      }
      op_->apply(tmp, k);
#pragma omp parallel for schedule(static)
      for (std::int64_t si = 0; si < count; ++si) {
        const auto i = static_cast<std::size_t>(si);
        u[i] -= h / 6.0 * (acc[i] + k[i]);
      }
    }
    if ((s + 1) % 32 == 0 || s + 1 == steps) {
      for (double v : u) {
        if (!std::isfinite(v)) throw NumericalFault(first_step + s + 1, t0 + static_cast<double>(s + 1) * h);
      }
    }
  }
}

GridFunction HeatPropagator::evolve(const GridFunction& u0, double t) const {
  return evolve_to(u0, {t}).front();
}

std::vector<GridFunction> HeatPropagator::evolve_to(const GridFunction& u0, const std::vector<double>& times,
                                                    std::vector<MetricsRow>* metrics) const {
  if (u0.size() != grid().size()) throw std::invalid_argument("evolve: initial data lives on another grid");
  std::vector<GridFunction> out;
  GridFunction u = u0;
  double t = 0.0;
  std::size_t step = 0;
  if (metrics) metrics->push_back(measure(0.0, u));
  for (double target : times) {
    if (!(target >= t)) throw std::invalid_argument("evolve: checkpoint times must be non-negative and increasing");
    const double span = target - t;
    if (span > 0.0) {
      const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt_ - 1e-9)));
      advance(u.values(), span / static_cast<double>(steps), steps, step, t);
      step += steps;
    }
    t = target;
    if (metrics && target > 0.0) metrics->push_back(measure(t, u));
    out.push_back(u);
  }
  return out;
}

std::vector<std::uint8_t> bulk_mask(const GridFunction& h, double value_floor, double box_fraction) {
  const auto& grid = h.grid();
  const double top = h.max();
  std::vector<std::uint8_t> mask(grid.size(), 0);
  std::vector<int> idx(static_cast<std::size_t>(grid.dimension()));
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (!(h[p] >= value_floor * top) || top <= 0.0) continue;
    grid.multi_index(p, idx);
    bool inside = true;
    for (std::size_t m = 0; m < idx.size() && inside; ++m) {
      inside = std::abs(grid.coordinate(m, idx[m])) <= box_fraction * grid.half_width(m) + 1e-12;
    }
    mask[p] = inside ? 1 : 0;
  }
  return mask;
}

KernelProbe kernel_probe(const GroupSpec& g, GridPtr grid, const std::vector<double>& times, PropagatorConfig config) {
  return kernel_probe(g, std::make_shared<const DiscreteSublaplacian>(g, std::move(grid)), times, config);
}

KernelProbe kernel_probe(const GroupSpec& g, OperatorPtr op, const std::vector<double>& times,
                         PropagatorConfig config) {
  HeatPropagator heat(std::move(op), config);
  for (double t : times) {
    if (t < 4.0 * heat.dt()) {
      std::ostringstream msg;
      msg << "kernel probe time " << t << " is below 4 dt = " << 4.0 * heat.dt();
      throw std::invalid_argument(msg.str());
    }
  }
  KernelProbe probe;
  probe.group = g.name();
  probe.homogeneous_dimension = g.homogeneous_dimension();
  probe.dt = heat.dt();
  auto delta = GridFunction::delta(heat.op().grid_ptr());
  auto snaps = heat.evolve_to(delta, times, &probe.metrics);
  for (std::size_t k = 0; k < times.size(); ++k) probe.snapshots.push_back({times[k], std::move(snaps[k])});
  return probe;
}

double symmetry_error(const GroupSpec& g, const GridFunction& h) {
  const auto& grid = h.grid();
  const auto mask = bulk_mask(h);
  const double top = h.max();
  double worst = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (!mask[p]) continue;
    const auto x = grid.coordinates(p);
    const auto y = inverse(g, x);
    worst = std::max(worst, std::abs(h[p] - interpolate(h, y)));
  }
  return worst / top;
}

double scaling_error(const GroupSpec& g, const GridFunction& early, const GridFunction& late, double r) {
  const auto& grid = early.grid();
  const auto mask = bulk_mask(early);
  const double factor = std::pow(r, -g.homogeneous_dimension());
  double worst = 0.0, top = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (!mask[p]) continue;
    const auto y = dilate(g, r, grid.coordinates(p));
    bool inside = true;
    for (std::size_t m = 0; m < y.size() && inside; ++m) inside = std::abs(y[m]) <= 0.7 * grid.half_width(m) + 1e-12;
    if (!inside) continue;
    const double expected = factor * early[p];
    top = std::max(top, expected);
    worst = std::max(worst, std::abs(interpolate(late, y) - expected));
  }
  if (top == 0.0) throw std::domain_error("scaling check: no bulk points survive the dilation");
  return worst / top;
}

KernelLawReport kernel_laws(const GroupSpec& g, const KernelProbe& probe, double settled, double shell_limit) {
  KernelLawReport rep;
  rep.mass_min = std::numeric_limits<double>::infinity();
  rep.mass_max = -rep.mass_min;
  for (const auto& row : probe.metrics) {
    if (row.shell_mass >= shell_limit) continue;
    rep.mass_min = std::min(rep.mass_min, row.mass);
    rep.mass_max = std::max(rep.mass_max, row.mass);
  }
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.symmetry_max = 0.0;
  for (const auto& snap : probe.snapshots) {
    rep.min_ratio = std::min(rep.min_ratio, snap.h.min() / snap.h.max());
    rep.times.push_back(snap.t);
    rep.symmetry.push_back(symmetry_error(g, snap.h));
    if (snap.t >= settled - 1e-12) rep.symmetry_max = std::max(rep.symmetry_max, rep.symmetry.back());
  }
  bool counted = false;
  for (const auto& a : probe.snapshots) {
    for (const auto& b : probe.snapshots) {
      if (std::abs(b.t - 4.0 * a.t) > 1e-9 * b.t) continue;
      rep.pairs.push_back({a.t, b.t, scaling_error(g, a.h, b.h, 2.0)});
      if (a.t >= settled - 1e-12) {
        rep.scaling_max = std::max(rep.scaling_max, rep.pairs.back().error);
        counted = true;
      }
    }
  }
  if (!counted) throw std::invalid_argument("kernel laws: need snapshots t and 4t with t >= " + format_double(settled));
  rep.mass_ok = rep.mass_min >= 0.99 && rep.mass_max <= 1.001;
  rep.positivity_ok = rep.min_ratio >= -1e-8;
  rep.symmetry_ok = rep.symmetry_max <= 0.05;
  rep.scaling_ok = rep.scaling_max <= 0.05;
  return rep;
}

KernelProbe probe_window(const KernelProbe& probe, double t_min, double t_max) {
  KernelProbe out = probe;
  out.snapshots.clear();
  for (const auto& snap : probe.snapshots) {
    if (snap.t >= t_min - 1e-12 && snap.t <= t_max + 1e-12) out.snapshots.push_back(snap);
  }
  return out;
}

SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: abscissae are all equal");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.x = x;
  fit.y = y;
  return fit;
}

GaussianBoundFit gaussian_bound_diagnostic(const GroupSpec& g, const KernelProbe& probe) {
  const double half_n = 0.5 * g.homogeneous_dimension();
  std::vector<double> z, y;
  for (const auto& snap : probe.snapshots) {
    const auto& h = snap.h;
    const auto mask = bulk_mask(h);
    const double floor = std::max(1e-6 * h.max(), 1e-8);
    for (std::size_t p = 0; p < h.size(); ++p) {
      if (!mask[p] || !(h[p] >= floor)) continue;
      const auto x = h.grid().coordinates(p);
      const double r = hom_norm(g.shape(), x);
      z.push_back(r * r / snap.t);
      y.push_back(std::log(h[p]) + half_n * std::log(snap.t));
    }
  }
  if (z.size() < 10) throw std::domain_error("gaussian bound diagnostic: insufficient samples");
  GaussianBoundFit fit;
  fit.samples = z.size();
  auto line = fit_line(z, y);
  fit.a = line.intercept;
  fit.b = -line.slope;
  double ss = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double e = y[i] - (fit.a - fit.b * z[i]);
    ss += e * e;
  }
  fit.rms = std::sqrt(ss / static_cast<double>(z.size()));
  std::size_t violations = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (y[i] > fit.a + 2.0 * fit.rms - fit.b * z[i]) ++violations;
  }
  fit.violation_rate = static_cast<double>(violations) / static_cast<double>(z.size());
  fit.pass = std::isfinite(fit.b) && fit.b > 0.0 && fit.violation_rate <= 0.05;
  return fit;
}

SlopeFit smoothing_rate(const KernelProbe& probe, double beta) {
  if (!(beta > 1.0)) throw std::invalid_argument("smoothing rate: beta must exceed 1");
  if (probe.snapshots.size() < 4) throw std::invalid_argument("smoothing rate: fewer than 4 checkpoints");
  std::vector<double> x, y;
  for (const auto& snap : probe.snapshots) {
    x.push_back(std::log(snap.t));
    y.push_back(std::log(lp_norm(snap.h, beta)));
  }
  return fit_line(x, y);
}

double expected_smoothing_slope(int homogeneous_dimension, double beta) {
  const double inv = std::isinf(beta) ? 0.0 : 1.0 / beta;
  return -0.5 * homogeneous_dimension * (1.0 - inv);
}

SmoothingFamilyResult smoothing_inequality_check(const GroupSpec& g, const HeatPropagator& heat, double alpha,
                                                 double beta, const std::vector<double>& lambdas,
                                                 const std::vector<double>& times,
                                                 const std::function<double(std::span<const double>)>& phi) {
  if (!(alpha >= 1.0 && beta >= alpha)) throw std::invalid_argument("smoothing check: need 1 <= alpha <= beta");
  const double inv_beta = std::isinf(beta) ? 0.0 : 1.0 / beta;
  const double power = 0.5 * g.homogeneous_dimension() * (1.0 / alpha - inv_beta);
  SmoothingFamilyResult result;
  result.lambdas = lambdas;
  for (double lambda : lambdas) {
    auto f = GridFunction::sample(heat.op().grid_ptr(), [&](std::span<const double> x) {
      Point<double> p(x.begin(), x.end());
      return phi(dilate(g, lambda, p));
    });
    const double denom = lp_norm(f, alpha);
    if (!(denom > 1e-300)) throw std::domain_error("smoothing check: norm underflow");
    double best = 0.0;
    auto snaps = heat.evolve_to(f, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
      best = std::max(best, lp_norm(snaps[k], beta) * std::pow(times[k], power) / denom);
    }
    result.constants.push_back(best);
  }
  const auto [lo, hi] = std::minmax_element(result.constants.begin(), result.constants.end());
  result.max_constant = *hi;
  result.spread = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
  return result;
}

}  // namespace carnot
