#pragma once

#include "carnot/heat.hpp"
#include "carnot/nonlinearity.hpp"

#include <functional>
#include <string>
#include <vector>

namespace carnot {

/// Quadrature for the subordination integrals
///   L^s f      = 1/Gamma(k-s) int nu^{k-s-1} L^k e^{-nu L} f dnu,   k = floor(s)+1
///   L^{-s} f   = 1/Gamma(s)   int nu^{s-1} e^{-nu L} f dnu
/// and the Id+L versions carrying an extra e^{-nu}. Nodes are log-spaced on
/// [nu_min, nu_max] with trapezoid weights in log nu; the piece below nu_min
/// is added in closed form with e^{-nu L} replaced by the identity.
struct SubordinationRule {
  double s = 0.0;
  bool inhomogeneous = false;
  /// Power k applied to L (or Id+L); zero on the negative branch.
  int k = 0;
  std::vector<double> nodes;
  /// Full node coefficients, Gamma factor and e^{-nu} included.
  std::vector<double> weights;
  double tail_weight = 0.0;
  /// k - s on the positive branch, -s on the negative one.
  double exponent = 0.0;
  double nu_min = 0.0;
  double nu_max = 0.0;

  /// (theta or 1+theta)^k.
  double polynomial(double theta) const;
  /// Scalar symbol the rule realizes on an eigenvalue theta.
  double symbol(double theta, bool exact_tails = false) const;
};

struct QuadratureOptions {
  int nodes = 60;
  double nu_min = 1e-4;
  double nu_max = 30.0;
  /// Krylov backend only: integrate the pieces below nu_min and above
  /// nu_max in closed form (incomplete gamma) instead of the identity
  /// approximation and truncation used by the sweep.
  bool exact_tails = true;
  /// Relative change of the Lanczos coefficients at which the Krylov
  /// backend stops.
  double krylov_tol = 1e-7;
};

SubordinationRule make_rule(double s, bool inhomogeneous, const QuadratureOptions& options = {});

enum class SemigroupBackend { krylov, sweep };

/// Applies phi(L_h) f for each phi with the Lanczos recurrence (two passes,
/// no stored basis). Requires a symmetric L_h.
struct LanczosResult {
  std::vector<GridFunction> values;
  std::size_t steps = 0;
  bool converged = false;
};
LanczosResult lanczos_apply(const DiscreteSublaplacian& op, const GridFunction& f,
                            const std::vector<std::function<double(double)>>& phis, double tol = 1e-9,
                            std::size_t max_steps = 3000);

struct PowerDiagnostics {
  /// Share of the L2 norm carried by the first and last quadrature nodes.
  double first_node_share = 0.0;
  double last_node_share = 0.0;
  bool range_warning = false;
  std::size_t krylov_steps = 0;
  bool converged = true;
};

struct SobolevNormReport {
  double s = 0.0;
  double p = 0.0;
  double lp = 0.0;
  double homogeneous = 0.0;    // ||L^{s/2} f||_p
  double inhomogeneous = 0.0;  // ||(Id+L)^{s/2} f||_p
  double surrogate = 0.0;      // ||f||_p + ||L^{s/2} f||_p
  /// inhomogeneous / surrogate (1 when f = 0).
  double equivalence_ratio = 1.0;
};

/// Fractional powers, Sobolev norms and semigroup samples on one grid.
class FractionalCalculus {
 public:
  FractionalCalculus(OperatorPtr op, QuadratureOptions options = {},
                     SemigroupBackend backend = SemigroupBackend::krylov, PropagatorConfig sweep_config = {});
  FractionalCalculus(const GroupSpec& g, GridPtr grid, QuadratureOptions options = {},
                     SemigroupBackend backend = SemigroupBackend::krylov);

  const DiscreteSublaplacian& op() const { return *op_; }
  const OperatorPtr& op_ptr() const { return op_; }
  const Grid& grid() const { return op_->grid(); }
  SemigroupBackend backend() const { return backend_; }
  const QuadratureOptions& options() const { return options_; }

  /// L^s f or (Id+L)^s f; |s| <= 4.
  GridFunction power(const GridFunction& f, double s, bool inhomogeneous, PowerDiagnostics* diag = nullptr) const;
  /// Several powers of one f sharing the semigroup work.
  std::vector<GridFunction> powers(const GridFunction& f, const std::vector<std::pair<double, bool>>& requests) const;

  SobolevNormReport sobolev_norm(const GridFunction& f, double s, double p) const;
  /// ||L^{s/2} f||_p
  double homogeneous_norm(const GridFunction& f, double s, double p) const;
  /// ||(Id+L)^{s/2} f||_p
  double inhomogeneous_norm(const GridFunction& f, double s, double p) const;

  /// e^{-tL} f
  GridFunction semigroup(const GridFunction& f, double t) const;
  /// e^{-tL} f at increasing times.
  std::vector<GridFunction> semigroups(const GridFunction& f, const std::vector<double>& times) const;

 private:
  std::vector<GridFunction> evaluate(const GridFunction& f, const std::vector<SubordinationRule>& rules,
                                     std::vector<PowerDiagnostics>* diags) const;

  OperatorPtr op_;
  QuadratureOptions options_;
  SemigroupBackend backend_;
  PropagatorConfig sweep_config_;
};

using TestFunction = std::function<double(std::span<const double>)>;

/// f o delta_lambda sampled on the grid.
GridFunction dilated(const GroupSpec& g, GridPtr grid, const TestFunction& f, double lambda);

/// Random smooth bump: a sum of 1 to 3 group-translated profiles
/// exp(-sum_m (y_m / w^{k_m})^{2K/k_m}), y = c^{-1} x, k_m the weight of axis m
/// and K the lcm of the weights, with seeded centres, widths and amplitudes.
TestFunction random_bump(const GroupSpec& g, std::uint64_t seed, double scale = 1.0);

/// One row of estimates.csv.
struct EstimateRow {
  std::string check;
  std::vector<std::pair<std::string, double>> params;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};
void write_estimates_csv(std::ostream& out, const std::vector<EstimateRow>& rows);

struct FamilyResult {
  std::vector<double> lambdas;
  std::vector<double> ratios;
  double spread = 1.0;  // max / min
  double max_ratio = 0.0;
  bool finite = true;
  bool skipped = false;  // 0/0 guard
};

/// ||f_l||_{L^q_a} / ||f_l||_{L^p_b} with a = b - N(1/p - 1/q). q = inf gives
/// the sup-norm variant ||f_l||_inf / ||f_l||_{L^p_b}, which needs b > N/p.
FamilyResult embedding_check(const GroupSpec& g, const FractionalCalculus& calc, double p, double q, double b,
                             const TestFunction& f, const std::vector<double>& lambdas);

struct GnParams {
  double alpha = 1.0;
  double p = 2.0;
  double q = 2.0;
  double theta = 0.5;
  /// gamma = theta alpha; 1/r = theta/p + (1 - theta)/q.
  double gamma() const { return theta * alpha; }
  double r() const;
};
/// ||f_l||_{D^r_gamma} / (||f_l||^theta_{D^p_alpha} ||f_l||^{1-theta}_q).
FamilyResult gn_check(const GroupSpec& g, const FractionalCalculus& calc, const GnParams& params,
                      const TestFunction& f, const std::vector<double>& lambdas);

struct LeibnizParams {
  double s = 0.5;
  double r = 2.0;
  double p1 = 4.0, q1 = 4.0;
  double p2 = 4.0, q2 = 4.0;
};
/// ||f h||_{D^r_s} / (||f||_{p1} ||h||_{D^{q1}_s} + ||h||_{q2} ||f||_{D^{p2}_s}).
double leibniz_ratio(const FractionalCalculus& calc, const LeibnizParams& params, const GridFunction& f,
                     const GridFunction& h);
FamilyResult leibniz_check(const GroupSpec& g, const FractionalCalculus& calc, const LeibnizParams& params,
                           const TestFunction& f, const TestFunction& h, const std::vector<double>& lambdas);

struct ChainRuleParams {
  double delta = 1.0;
  double p = 2.0;
  double q = 4.0;
  double r = 4.0;
};
/// ||L^{delta/2} F(u_l)||_p / (||u_l||_r^{alpha-1} ||L^{delta/2} u_l||_q), requiring
/// 1/p = (alpha-1)/r + 1/q and 0 <= delta <= floor(alpha).
FamilyResult chain_rule_check(const GroupSpec& g, const FractionalCalculus& calc, const Nonlinearity& F,
                              const ChainRuleParams& params, const TestFunction& u,
                              const std::vector<double>& lambdas);

/// Raised when exponents fall outside a check's admissible range.
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// ||F(u_l)||_{L^p_{s_alpha}} / ||u_l||^alpha_{L^p_s}; needs N/p - N/alpha < s < N/p,
/// s >= 0 and an N1 or N2 classification.
FamilyResult theorem2_check(const GroupSpec& g, const FractionalCalculus& calc, const Nonlinearity& F, double p,
                            double s, const TestFunction& u, const std::vector<double>& lambdas);

struct SquareFunctionResult {
  int j_min = 0;
  int j_max = 0;
  double square_norm = 0.0;
  double lp = 0.0;
  double ratio = 0.0;  // square_norm / lp, 0 for f = 0
};
/// ||(sum_j |psi_j f|^2)^{1/2}||_p with psi_j f = e^{-4^{-j} L} f - e^{-4^{1-j} L} f.
/// Needs 4^{-j_max} >= 4 dt (dt the propagator policy step) and
/// 4^{1-j_min} <= window; throws std::domain_error otherwise.
SquareFunctionResult lp_square_function(const FractionalCalculus& calc, const GridFunction& f, double p, int j_min,
                                        int j_max, double window = 64.0);

/// E(t) = max over the family of ||e^{-tL} f_l||_{L^p_{s+theta}} / ||f_l||_{L^p_s};
/// fitted slope of log E against log t.
SlopeFit sobolev_smoothing_rate(const GroupSpec& g, const FractionalCalculus& calc, double s, double theta, double p,
                                const std::vector<double>& times, const TestFunction& f,
                                const std::vector<double>& lambdas);

}  // namespace carnot
