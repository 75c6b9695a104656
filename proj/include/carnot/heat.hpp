#pragma once

#include "carnot/operator.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

namespace carnot {

enum class Integrator { rk4, euler };

struct PropagatorConfig {
  double safety = 0.25;
  Integrator integrator = Integrator::rk4;
  /// Explicit step; rejected when larger than the policy step.
  std::optional<double> dt;
};

/// NaN or Inf met while stepping.
class NumericalFault : public std::runtime_error {
 public:
  NumericalFault(std::size_t step, double t);
  std::size_t step() const { return step_; }
  double time() const { return time_; }

 private:
  std::size_t step_;
  double time_;
};

struct MetricsRow {
  double t = 0.0;
  double mass = 0.0;
  double linf = 0.0;
  double l2 = 0.0;
  double shell_mass = 0.0;
};
MetricsRow measure(double t, const GridFunction& u);
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);

using OperatorPtr = std::shared_ptr<const DiscreteSublaplacian>;

/// Time stepping for du/dt = -L_h u.
class HeatPropagator {
 public:
  HeatPropagator(const GroupSpec& g, GridPtr grid, PropagatorConfig config = {});
  HeatPropagator(OperatorPtr op, PropagatorConfig config = {});

  const DiscreteSublaplacian& op() const { return *op_; }
  const OperatorPtr& op_ptr() const { return op_; }
  const Grid& grid() const { return op_->grid(); }
  double policy_dt() const { return policy_dt_; }
  double dt() const { return dt_; }
  const PropagatorConfig& config() const { return config_; }

  /// Approximates e^{-tL} u0; the step is shrunk so the run ends exactly at t.
  GridFunction evolve(const GridFunction& u0, double t) const;
  /// Snapshots at increasing times; metrics rows are appended when given.
  std::vector<GridFunction> evolve_to(const GridFunction& u0, const std::vector<double>& times,
                                      std::vector<MetricsRow>* metrics = nullptr) const;
  /// Advances in place by `steps` steps of size h.
  void advance(std::span<double> u, double h, std::size_t steps, std::size_t first_step = 0, double t0 = 0.0) const;

 private:
  OperatorPtr op_;
  PropagatorConfig config_;
  double policy_dt_ = 0.0;
  double dt_ = 0.0;
};

/// Bulk: value at least 1e-6 of the maximum and |x_m| <= 0.7 R_m on every axis.
std::vector<std::uint8_t> bulk_mask(const GridFunction& h, double value_floor = 1e-6, double box_fraction = 0.7);

struct KernelSnapshot {
  double t = 0.0;
  GridFunction h;
};

struct KernelProbe {
  std::string group;
  int homogeneous_dimension = 0;
  double dt = 0.0;
  std::vector<KernelSnapshot> snapshots;
  std::vector<MetricsRow> metrics;
};

/// Evolves the discrete delta at 0. Times must be at least 4 dt.
KernelProbe kernel_probe(const GroupSpec& g, GridPtr grid, const std::vector<double>& times,
                         PropagatorConfig config = {});
KernelProbe kernel_probe(const GroupSpec& g, OperatorPtr op, const std::vector<double>& times,
                         PropagatorConfig config = {});

/// max over the bulk of |h(x) - h(x^{-1})| / max h.
double symmetry_error(const GroupSpec& g, const GridFunction& h);
/// max over bulk x with delta_r x in the bulk box of
/// |h_late(delta_r x) - r^{-N} h_early(x)| / max(r^{-N} h_early).
double scaling_error(const GroupSpec& g, const GridFunction& early, const GridFunction& late, double r);

struct GaussianBoundFit {
  double a = 0.0;
  double b = 0.0;
  double rms = 0.0;
  double violation_rate = 0.0;
  std::size_t samples = 0;
  bool pass = false;
};
/// Least squares of log h + (N/2) log t = a - b |x|_G^2 / t over bulk samples;
/// the envelope a + 2 rms - b z may be exceeded by at most 5% of them.
GaussianBoundFit gaussian_bound_diagnostic(const GroupSpec& g, const KernelProbe& probe);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> x;
  std::vector<double> y;
};
SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Slope of log ||h_t||_beta against log t over the probe snapshots.
SlopeFit smoothing_rate(const KernelProbe& probe, double beta);
double expected_smoothing_slope(int homogeneous_dimension, double beta);

struct ScalingPair {
  double early = 0.0;
  double late = 0.0;  // 4 early
  double error = 0.0;
};

/// Kernel laws over a probe. Mass is taken while the shell mass stays below
/// shell_limit; symmetry and scaling count snapshots from `settled` on, and
/// every snapshot stays in the per-time vectors.
struct KernelLawReport {
  double mass_min = 0.0;
  double mass_max = 0.0;
  double min_ratio = 0.0;  // min over snapshots of min h / max h
  std::vector<double> times;
  std::vector<double> symmetry;
  std::vector<ScalingPair> pairs;
  double symmetry_max = 0.0;
  double scaling_max = 0.0;
  bool mass_ok = false;
  bool positivity_ok = false;
  bool symmetry_ok = false;
  bool scaling_ok = false;
  bool pass() const { return mass_ok && positivity_ok && symmetry_ok && scaling_ok; }
};
KernelLawReport kernel_laws(const GroupSpec& g, const KernelProbe& probe, double settled = 1.0,
                            double shell_limit = 1e-3);

/// Snapshots with t in [t_min, t_max].
KernelProbe probe_window(const KernelProbe& probe, double t_min, double t_max);

struct SmoothingFamilyResult {
  std::vector<double> lambdas;
  std::vector<double> constants;  // max over t of C(lambda, t)
  double max_constant = 0.0;
  double spread = 0.0;            // max / min
};
/// C(lambda, t) = ||e^{-tL} phi_lambda||_beta t^{(N/2)(1/alpha - 1/beta)} / ||phi_lambda||_alpha
/// with phi_lambda = phi o delta_lambda.
SmoothingFamilyResult smoothing_inequality_check(const GroupSpec& g, const HeatPropagator& heat, double alpha,
                                                 double beta, const std::vector<double>& lambdas,
                                                 const std::vector<double>& times,
                                                 const std::function<double(std::span<const double>)>& phi);

}  // namespace carnot
