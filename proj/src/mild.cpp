#include "carnot/mild.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace carnot {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> checkpoint_times(double T, int n) {
  if (!(T > 0.0) || n < 1) throw std::invalid_argument("solver: need T > 0 and at least one checkpoint");
  std::vector<double> times(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) times[static_cast<std::size_t>(i)] = T * i / n;
  return times;
}

double lps_norm(const FractionalCalculus& calc, const GridFunction& u, const ProblemParams& p) {
  return calc.inhomogeneous_norm(u, p.s, p.p);
}

RunRow norm_row(const FractionalCalculus& calc, const ProblemParams& p, int iter, double t, const GridFunction& u,
                double diff) {
  return {iter, t, lp_norm(u, p.p), lps_norm(calc, u, p), lp_norm(u, p.p_tilde), lp_norm(u, kInf), diff};
}

bool row_due(std::size_t n, std::size_t last, int stride) {
  return n == last || (stride > 0 && n % static_cast<std::size_t>(stride) == 0);
}

/// RK4 for dv/dt = -L v + G(t); G is affine in time on each call.
class ForcedStepper {
 public:
  explicit ForcedStepper(const DiscreteSublaplacian& op, std::size_t n)
      : op_(op), k_(n), acc_(n), tmp_(n), g0_(n), gm_(n), g1_(n) {}

  /// Advances v over [0, span] of one checkpoint interval, where the forcing
  /// moves linearly from fa to fb (either may be null for zero forcing).
  void interval(std::span<double> v, double span, std::size_t steps, const GridFunction* fa, const GridFunction* fb) {
    const double h = span / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps; ++s) {
      const double a = static_cast<double>(s) / static_cast<double>(steps);
      const double m = (s + 0.5) / static_cast<double>(steps);
      const double b = static_cast<double>(s + 1) / static_cast<double>(steps);
      forcing(g0_, a, fa, fb);
      forcing(gm_, m, fa, fb);
      forcing(g1_, b, fa, fb);
      step(v, h);
    }
  }

 private:
  void forcing(std::vector<double>& out, double w, const GridFunction* fa, const GridFunction* fb) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = (fa ? (1.0 - w) * (*fa)[i] : 0.0) + (fb ? w * (*fb)[i] : 0.0);
    }
  }

  void step(std::span<double> v, double h) {
    const std::size_t n = v.size();
    op_.apply(v, k_);
    for (std::size_t i = 0; i < n; ++i) {
      const double k = g0_[i] - k_[i];
      acc_[i] = k;
      tmp_[i] = v[i] + 0.5 * h * k;
    }
    op_.apply(tmp_, k_);
    for (std::size_t i = 0; i < n; ++i) {
      const double k = gm_[i] - k_[i];
      acc_[i] += 2.0 * k;
      tmp_[i] = v[i] + 0.5 * h * k;
    }
    op_.apply(tmp_, k_);
    for (std::size_t i = 0; i < n; ++i) {
      const double k = gm_[i] - k_[i];
      acc_[i] += 2.0 * k;
      tmp_[i] = v[i] + h * k;
    }
    op_.apply(tmp_, k_);
    for (std::size_t i = 0; i < n; ++i) v[i] += h / 6.0 * (acc_[i] + g1_[i] - k_[i]);
  }

  const DiscreteSublaplacian& op_;
  std::vector<double> k_, acc_, tmp_, g0_, gm_, g1_;
};

bool finite(const GridFunction& u) { return u.all_finite(); }

}  // namespace

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::converged:
      return "converged";
    case RunStatus::max_iter:
      return "max-iter";
    case RunStatus::non_contraction:
      return "non-contraction";
    case RunStatus::blow_up:
      return "blow-up";
    case RunStatus::completed:
      return "completed";
  }
  return "completed";
}

SolverRun picard_solve(const FractionalCalculus& calc, const GridFunction& u0, const SolverConfig& config) {
  const auto& params = config.params;
  if (params.regime == Regime::invalid) throw std::invalid_argument("picard: parameters are not in a valid regime");
  SolverRun run;
  run.params = params;
  run.F = config.F;
  run.times = checkpoint_times(config.T, config.checkpoints);
  const std::size_t last = run.times.size() - 1;
  const auto& op = calc.op();
  const double dt = op.time_step(config.propagator.safety);
  const double span = run.times[1] - run.times[0];
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt - 1e-9)));
  ForcedStepper stepper(op, u0.size());

  auto sweep = [&](const std::vector<GridFunction>* forcing) {
    std::vector<GridFunction> out{u0};
    GridFunction v = u0;
    for (std::size_t n = 0; n < last; ++n) {
      stepper.interval(v.values(), span, steps, forcing ? &(*forcing)[n] : nullptr,
                       forcing ? &(*forcing)[n + 1] : nullptr);
      out.push_back(v);
    }
    return out;
  };
  auto X = [&](const GridFunction& u) { return lp_norm(u, params.p_tilde); };

  std::vector<GridFunction> current = sweep(nullptr);
  if (config.perturbation) {
    for (std::size_t n = 1; n <= last; ++n) current[n] += *config.perturbation;
  }
  for (std::size_t n = 0; n <= last; ++n) {
    if (row_due(n, last, config.norm_stride)) run.rows.push_back(norm_row(calc, params, 0, run.times[n], current[n], kNaN));
  }

  double previous_diff = kNaN;
  int streak = 0;
  run.status = RunStatus::max_iter;
  for (int j = 1; j <= config.max_iter; ++j) {
    std::vector<GridFunction> forcing;
    forcing.reserve(current.size());
    for (const auto& u : current) forcing.push_back(config.F.apply(u));
    auto next = sweep(&forcing);
    run.iterations = j;

    bool ok = true;
    for (const auto& u : next) ok = ok && finite(u);
    if (!ok) {
      run.status = RunStatus::blow_up;
      run.message = "non-finite iterate";
      break;
    }
    double diff = 0.0, size = 0.0;
    for (std::size_t n = 0; n <= last; ++n) {
      const double d = X(next[n] - current[n]);
      diff = std::max(diff, d);
      size = std::max(size, X(next[n]));
      if (row_due(n, last, config.norm_stride)) run.rows.push_back(norm_row(calc, params, j, run.times[n], next[n], d));
    }
    if (std::isfinite(previous_diff) && previous_diff > 0.0) {
      const double ratio = diff / previous_diff;
      run.contraction_ratios.push_back(ratio);
      streak = ratio >= 1.0 ? streak + 1 : 0;
    }
    previous_diff = diff;
    current = std::move(next);
    if (diff <= config.tol * size) {
      run.status = RunStatus::converged;
      break;
    }
    if (streak >= 3) {
      run.status = RunStatus::non_contraction;
      run.message = "successive differences grew three times in a row; shrink T0";
      break;
    }
  }
  run.snapshots = std::move(current);
  run.t_star = run.status == RunStatus::blow_up ? 0.0 : config.T;
  return run;
}

SolverRun direct_solve(const FractionalCalculus& calc, const GridFunction& u0, const SolverConfig& config) {
  const auto& params = config.params;
  SolverRun run;
  run.params = params;
  run.F = config.F;
  run.times = checkpoint_times(config.T, config.checkpoints);
  const std::size_t last = run.times.size() - 1;
  const auto& op = calc.op();
  const double policy = op.time_step(config.propagator.safety);
  const double alpha = config.F.alpha();
  const bool linear = config.F.kind() == NonlinearityKind::zero;
  const double linf0 = lp_norm(u0, kInf);
  const double threshold = config.blowup_factor * std::max(linf0, 1e-300);
  const std::size_t size = u0.size();

  std::vector<double> k(size), acc(size), tmp(size), lu(size);
  auto rhs = [&](std::span<const double> w, std::vector<double>& out) {
    op.apply(w, lu);
    for (std::size_t i = 0; i < size; ++i) out[i] = config.F(w[i]) - lu[i];
  };
  auto rk4 = [&](std::span<double> u, double h) {
    rhs(u, k);
    for (std::size_t i = 0; i < size; ++i) {
      acc[i] = k[i];
      tmp[i] = u[i] + 0.5 * h * k[i];
    }
    rhs(tmp, k);
    for (std::size_t i = 0; i < size; ++i) {
      acc[i] += 2.0 * k[i];
      tmp[i] = u[i] + 0.5 * h * k[i];
    }
    rhs(tmp, k);
    for (std::size_t i = 0; i < size; ++i) {
      acc[i] += 2.0 * k[i];
      tmp[i] = u[i] + h * k[i];
    }
    rhs(tmp, k);
    for (std::size_t i = 0; i < size; ++i) u[i] += h / 6.0 * (acc[i] + k[i]);
  };

  GridFunction u = u0;
  run.snapshots.push_back(u);
  run.rows.push_back(norm_row(calc, params, 0, 0.0, u, kNaN));
  run.trace.emplace_back(0.0, lps_norm(calc, u, params));
  double recorded = linf0;
  double t = 0.0;
  run.status = RunStatus::completed;
  for (std::size_t n = 0; n < last && run.status == RunStatus::completed; ++n) {
    const double target = run.times[n + 1];
    if (linear) {
      const double span = target - t;
      const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / policy - 1e-9)));
      for (std::size_t s = 0; s < steps; ++s) rk4(u.values(), span / static_cast<double>(steps));
      t = target;
    } else {
      while (t < target) {
        const double m = lp_norm(u, kInf);
        double h = std::min(policy, config.nonlinear_cfl / (alpha * std::pow(std::max(m, 1e-300), alpha - 1.0)));
        bool lands = false;
        if (t + h >= target * (1.0 - 1e-14)) {
          h = target - t;
          lands = true;
        }
        rk4(u.values(), h);
        const double now = lands ? target : t + h;
        const double linf = lp_norm(u, kInf);
        if (!std::isfinite(linf) || linf > threshold) {
          run.status = RunStatus::blow_up;
          run.message = std::isfinite(linf) ? "sup norm exceeded the blow-up threshold" : "non-finite values";
          break;
        }
        t = now;
        if (linf >= 1.1 * recorded) {
          run.trace.emplace_back(t, lps_norm(calc, u, params));
          recorded = linf;
        }
      }
    }
    if (run.status != RunStatus::completed) break;
    if (!finite(u)) {
      run.status = RunStatus::blow_up;
      run.message = "non-finite values";
      break;
    }
    run.snapshots.push_back(u);
    if (row_due(n + 1, last, config.norm_stride)) run.rows.push_back(norm_row(calc, params, 0, t, u, kNaN));
  }
  run.t_star = t;
  if (run.status == RunStatus::blow_up) {
    run.times.resize(run.snapshots.size());
    std::ostringstream msg;
    msg << run.message << " after t = " << t;
    run.message = msg.str();
  }
  return run;
}

void write_run_csv(std::ostream& out, const SolverRun& run) {
  out << "iter,t,lp,lps,lptilde,linf,diff_prev\n";
  for (const auto& r : run.rows) {
    out << r.iter << ',' << format_double(r.t) << ',' << format_double(r.lp) << ',' << format_double(r.lps) << ','
        << format_double(r.lptilde) << ',' << format_double(r.linf) << ',' << format_double(r.diff_prev) << '\n';
  }
}

BlowupReport blowup_monitor(const SolverRun& run) {
  BlowupReport rep;
  const auto& p = run.params;
  rep.bound = 0.5 * (p.s - p.s_c);
  rep.ode_rate = 1.0 / (run.F.alpha() - 1.0);
  if (run.status != RunStatus::blow_up) {
    rep.message = "no divergence";
    return rep;
  }
  const auto& tr = run.trace;
  if (tr.size() < 6) {
    rep.message = "insufficient checkpoints";
    return rep;
  }
  std::vector<double> t, y;
  for (const auto& [time, norm] : tr) {
    if (!(norm > 0.0)) continue;
    t.push_back(time);
    y.push_back(std::log(norm));
  }
  if (t.size() < 6 || !(y.back() > y.front() + std::log(100.0))) {
    rep.message = "no divergence";
    return rep;
  }
  rep.diverged = true;
  // Times at which log ||u|| crosses three levels spaced by log 2 below the last sample.
  auto crossing = [&](double level) {
    for (std::size_t i = 1; i < y.size(); ++i) {
      if (y[i] >= level) {
        const double w = (level - y[i - 1]) / (y[i] - y[i - 1]);
        return t[i - 1] + w * (t[i] - t[i - 1]);
      }
    }
    return t.back();
  };
  const double step = std::log(2.0);
  const double t0 = crossing(y.back() - 2.0 * step);
  const double t1 = crossing(y.back() - step);
  const double t2 = crossing(y.back());
  const double d1 = t1 - t0, d2 = t2 - t1;
  double T = t2;
  if (d1 - d2 > 0.0) T = t2 + d2 * d2 / (d1 - d2);
  if (!(T > t.back())) T = t.back() + 1e-12 * std::max(1.0, t.back());
  rep.t_max = T;

  // Fit over the samples where the norm has grown at least tenfold.
  std::vector<double> fx, fy;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (y[i] < y.front() + std::log(10.0)) continue;
    fx.push_back(-std::log(T - t[i]));
    fy.push_back(y[i]);
  }
  rep.points = fx.size();
  if (fx.size() < 6) {
    rep.diverged = false;
    rep.message = "insufficient checkpoints";
    return rep;
  }
  rep.kappa = fit_line(fx, fy).slope;
  rep.pass = rep.kappa >= 0.85 * rep.bound;
  rep.message = rep.pass ? "rate consistent with the lower bound" : "rate below the lower bound";
  return rep;
}

ScalingReport scaling_invariance_check(const GroupSpec& g, const FractionalCalculus& calc, const SolverRun& run,
                                       double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("scaling check: lambda must be positive");
  if (run.snapshots.size() < 3) throw std::invalid_argument("scaling check: need at least three checkpoints");
  const auto& grid = calc.grid();
  const auto grid_ptr = calc.op().grid_ptr();
  const std::size_t d = static_cast<std::size_t>(grid.dimension());
  const double alpha = run.F.alpha();
  const double amp = std::pow(lambda, 2.0 / (alpha - 1.0));

  // Source index of delta_lambda x for every grid point, or -1 outside the box.
  std::vector<std::int64_t> source(grid.size(), -1);
  std::vector<std::uint8_t> inside(grid.size(), 0);
  std::vector<int> idx(d), mapped(d);
  std::vector<double> x(d);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    grid.multi_index(p, idx);
    bool ok = true, bulk = true;
    for (std::size_t m = 0; m < d; ++m) {
      const double factor = std::pow(lambda, g.shape().weight(m));
      const int centre = (grid.points(m) - 1) / 2;
      const double target = centre + factor * (idx[m] - centre);
      const double rounded = std::round(target);
      if (std::abs(target - rounded) > 1e-9) {
        throw std::invalid_argument("scaling check: delta_lambda does not map grid points to grid points");
      }
      if (rounded < 0 || rounded > grid.points(m) - 1) ok = false;
      mapped[m] = static_cast<int>(rounded);
      const double coord = grid.coordinate(m, mapped[m]);
      if (std::abs(coord) > 0.7 * grid.half_width(m)) bulk = false;
    }
    if (ok) source[p] = static_cast<std::int64_t>(grid.flat_index(mapped));
    inside[p] = ok && bulk;
  }
  auto resample = [&](const GridFunction& u) {
    GridFunction out(grid_ptr);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      if (source[p] >= 0) out[p] = amp * u[static_cast<std::size_t>(source[p])];
    }
    return out;
  };

  ScalingReport rep;
  rep.lambda = lambda;
  const double dt_base = run.times[1] - run.times[0];
  const std::size_t count = run.snapshots.size();
  const std::size_t stride = std::max<std::size_t>(1, (count - 2) / 8);
  for (std::size_t n = 1; n + 1 < count; n += stride) {
    const auto u = resample(run.snapshots[n]);
    auto ut = resample(run.snapshots[n + 1]);
    ut -= resample(run.snapshots[n - 1]);
    ut *= lambda * lambda / (2.0 * dt_base);
    const auto lu = calc.op().apply(u);
    double num = 0.0, den = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
      if (!inside[p]) continue;
      const double r = ut[p] + lu[p] - run.F(u[p]);
      num += r * r;
      den += ut[p] * ut[p];
    }
    const double res = den > 0.0 ? std::sqrt(num / den) : (num > 0.0 ? kInf : 0.0);
    rep.times.push_back(run.times[n] / (lambda * lambda));
    rep.residuals.push_back(res);
    rep.max_residual = std::max(rep.max_residual, res);
  }
  const double s_c = run.params.s_c;
  if (s_c >= 0.0) {
    rep.base_norm = calc.homogeneous_norm(run.snapshots.front(), s_c, run.params.p);
    rep.scaled_norm = calc.homogeneous_norm(resample(run.snapshots.front()), s_c, run.params.p);
  }
  rep.pass = rep.max_residual <= 0.05;
  return rep;
}

Calibration calibrate_constants(const GroupSpec& g, const FractionalCalculus& calc, const ProblemParams& params,
                                const std::vector<TestFunction>& family, const std::vector<double>& lambdas,
                                const std::vector<double>& times) {
  if (!(params.beta < 1.0) || !std::isfinite(params.p_tilde)) {
    throw std::domain_error("calibration: needs beta < 1 and finite p~");
  }
  HeatPropagator heat(calc.op_ptr());
  Calibration cal;
  const double a = std::max(1.0, params.p_tilde / params.alpha);
  for (const auto& f : family) {
    cal.M = std::max(cal.M, smoothing_inequality_check(g, heat, a, params.p_tilde, lambdas, times, f).max_constant);
    for (double lambda : lambdas) {
      const auto u = dilated(g, calc.op().grid_ptr(), f, lambda);
      const double den = calc.inhomogeneous_norm(u, params.s, params.p);
      if (den > 0.0) cal.C = std::max(cal.C, lp_norm(u, params.p_tilde) / den);
    }
  }
  return cal;
}

}  // namespace carnot
