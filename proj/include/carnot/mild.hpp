#pragma once

#include "carnot/nonlinearity.hpp"
#include "carnot/sobolev.hpp"

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace carnot {

enum class RunStatus { converged, max_iter, non_contraction, blow_up, completed };
std::string to_string(RunStatus status);

struct SolverConfig {
  ProblemParams params;
  Nonlinearity F;
  /// Final time; Picard runs on [0, T0].
  double T = 1.0;
  /// Uniform checkpoints after t = 0.
  int checkpoints = 64;
  double tol = 1e-6;
  int max_iter = 30;
  /// Norm rows are written for every `norm_stride`-th checkpoint and the last.
  int norm_stride = 8;
  PropagatorConfig propagator;
  /// Direct stepping keeps dt <= nonlinear_cfl / (alpha ||u||_inf^{alpha-1}).
  double nonlinear_cfl = 0.05;
  double blowup_factor = 1e6;
  /// Added to the first Picard iterate (uniqueness probe).
  std::optional<GridFunction> perturbation;
};

/// One row of run.csv.
struct RunRow {
  int iter = 0;
  double t = 0.0;
  double lp = 0.0;
  double lps = 0.0;
  double lptilde = 0.0;
  double linf = 0.0;
  double diff_prev = 0.0;  // NaN for the first iterate
};

struct SolverRun {
  ProblemParams params;
  Nonlinearity F;
  std::vector<double> times;            // t_0 = 0 .. t_n
  std::vector<GridFunction> snapshots;  // final iterate at `times`
  std::vector<RunRow> rows;
  std::vector<double> contraction_ratios;
  RunStatus status = RunStatus::completed;
  int iterations = 0;
  /// Last time with finite data below the blow-up threshold.
  double t_star = 0.0;
  std::string message;
  /// (t, ||u||_{L^p_s}) sampled whenever ||u||_inf grows by 10% (direct runs).
  std::vector<std::pair<double, double>> trace;
};

/// u^{j+1} solves dv/dt = -L v + F(u^j) with v(0) = u0, F(u^j) linear in time
/// between checkpoints; u^0 = e^{-tL} u0.
SolverRun picard_solve(const FractionalCalculus& calc, const GridFunction& u0, const SolverConfig& config);

/// RK4 for du/dt = -L u + F(u) with the nonlinear step restriction.
SolverRun direct_solve(const FractionalCalculus& calc, const GridFunction& u0, const SolverConfig& config);

void write_run_csv(std::ostream& out, const SolverRun& run);

struct BlowupReport {
  bool diverged = false;
  std::string message;
  std::size_t points = 0;
  double t_max = 0.0;
  double kappa = 0.0;
  double bound = 0.0;     // (s - s_c)/2
  double ode_rate = 0.0;  // 1/(alpha-1)
  bool pass = false;      // kappa >= 0.85 bound
};

/// T_max by Aitken extrapolation of the times at which log ||u|| crosses
/// three equally spaced levels, then kappa from log ||u|| against
/// -log(T_max - t).
BlowupReport blowup_monitor(const SolverRun& run);

struct ScalingReport {
  double lambda = 1.0;
  std::vector<double> times;
  std::vector<double> residuals;
  double max_residual = 0.0;
  /// ||.||_{D^p_{s_c}} of u(0) and u_lambda(0); NaN when s_c < 0.
  double base_norm = std::numeric_limits<double>::quiet_NaN();
  double scaled_norm = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;  // max_residual <= 5%
};

/// Resamples u_lambda(t, x) = lambda^{2/(alpha-1)} u(lambda^2 t, delta_lambda x) on
/// grid indices and measures ||d_t u_l + L u_l - F(u_l)||_2 / ||d_t u_l||_2
/// where delta_lambda x lies in the 0.7 R box. The time derivative is a
/// centred difference of stored checkpoints.
ScalingReport scaling_invariance_check(const GroupSpec& g, const FractionalCalculus& calc, const SolverRun& run,
                                       double lambda);

struct Calibration {
  double M = 0.0;  // smoothing constant L^{p~/alpha} -> L^{p~}
  double C = 0.0;  // embedding constant L^p_s -> L^{p~}
};
/// Largest constants seen over a family and dilations.
Calibration calibrate_constants(const GroupSpec& g, const FractionalCalculus& calc, const ProblemParams& params,
                                const std::vector<TestFunction>& family, const std::vector<double>& lambdas,
                                const std::vector<double>& times);

}  // namespace carnot
