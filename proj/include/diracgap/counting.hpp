#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diracgap/floquet.hpp"
#include "diracgap/integrate.hpp"
#include "diracgap/parallel.hpp"
#include "diracgap/potentials.hpp"

namespace diracgap {

/// Separated boundary condition u1 sin(beta) + u2 cos(beta) = 0, i.e. the
/// Prufer angle is congruent to beta modulo pi.
struct BoundaryCondition {
  double beta = 0.0;  ///< in [0, pi)

  static BoundaryCondition angle(double beta);
  /// u2 = 0.
  static BoundaryCondition u2_zero() { return {0.0}; }
  /// u1 + u2 = 0, the condition placed at the inner truncation point.
  static BoundaryCondition sum_zero();
};

struct CountResult {
  long N = 0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double a = 0.0;  ///< left end of the counting interval (r_inner for half-line counts)
  double b = 0.0;  ///< right end (r_outer)
  std::optional<double> c;
  /// Worst-case deviation of N from the count it stands for.
  int error_budget = 0;
  double theta1 = 0.0;  ///< theta(b; lambda1)
  double theta2 = 0.0;  ///< theta(b; lambda2)
  std::vector<std::string> warnings;
};

struct CountOptions {
  StepControl ctrl{1e-7, 16, Method::automatic, 16};
  /// theta(b; lambda_i) closer than this to the target lattice flags an
  /// eigenvalue at the window end.
  double ambiguity = 1e-9;
};

/// Unwrapped theta(b; lambda) of the solution with theta(a) = left.beta.
double shoot_angle(const DiracSystem& sys, double a, double b, BoundaryCondition left,
                   double lambda, const StepControl& ctrl = CountOptions{}.ctrl);

/// Number of eigenvalues in (lambda1, lambda2] of the operator on [a, b] with
/// separated conditions: #{ j : theta(b; lambda1) < beta_b + j pi <= theta(b; lambda2) }.
CountResult count_interval(const DiracSystem& sys, double a, double b, BoundaryCondition left,
                           BoundaryCondition right, double lambda1, double lambda2,
                           const CountOptions& opt = {});

struct LimitRow {
  double length;
  long N;
  double ratio;  ///< N / length
};

struct LimitTable {
  double limit;  ///< (k(lambda2) - k(lambda1)) / (alpha pi)
  std::vector<LimitRow> rows;
};

/// Counts on [0, L] for each L, next to the integrated-density-of-states limit.
LimitTable density_of_states_limit(const DiracSystem& sys, BoundaryCondition left, BoundaryCondition right,
                            double lambda1, double lambda2, std::span<const double> lengths,
                            const CountOptions& opt = {}, Execution exec = Execution::parallel);

struct TruncationPlan {
  double rho0 = 0.0;  ///< inner cut (scaled variable); 0 when the template is bounded at 0
  double P0 = 0.0;    ///< |l0| < gap_margin beyond P0
  double outer_margin = 4.0;
  double threshold = 0.0;  ///< (|q|_inf + max |lambda_i| + 1)^2
  double C = 0.0;
  double c0 = 1.0;  ///< C + 1
  double gap_margin = 0.0;
  bool inner_degenerate = false;

  double rho_outer() const { return P0 * outer_margin; }
};

struct TruncationOptions {
  double outer_margin = 4.0;
  double rho_search_min = 1e-8;
  double rho_search_max = 1e6;
  int points_per_decade = 64;
  BandScanOptions band{};
};

/// Inner and outer cuts for the half-line count. Throws PreconditionError if
/// [lambda1 - gap_margin, lambda2 + gap_margin] is not inside a gap of the
/// unperturbed system, or if no inner cut can be certified.
TruncationPlan plan_truncation(const DiracSystem& background, const PerturbationTemplate& tmpl,
                               double lambda1, double lambda2, double C, double gap_margin,
                               const TruncationOptions& opt = {});

struct HalfLineOptions {
  BoundaryCondition inner = BoundaryCondition::sum_zero();
  BoundaryCondition outer = BoundaryCondition::u2_zero();
  CountOptions count{};
};

/// Eigenvalues in (lambda1, lambda2] of -i sigma_2 d/dr + m sigma_3 + q(r) + l0(r/c) sigma_1
/// restricted to [c rho0, c P0 outer_margin]. The error budget covers two
/// cuts (2 each) and the tail beyond the outer cut (at most 2).
CountResult count_halfline(const DiracSystem& background, const PerturbationTemplate& tmpl,
                           double c, double lambda1, double lambda2, const TruncationPlan& plan,
                           const HalfLineOptions& opt = {});

struct SplitCheck {
  long lhs = 0;    ///< |sum_j N_j - N|
  long bound = 0;  ///< 2 (n + 1) for n cut points
  bool ok = false;
  long N_whole = 0;
  std::vector<long> N_parts;
};

/// Compares the count on [a, b] with the sum of counts on the pieces cut at
/// `cuts` (each cut carries `cut_bc` on both sides).
SplitCheck split_count_check(const DiracSystem& sys, double a, double b,
                             std::span<const double> cuts, BoundaryCondition left,
                             BoundaryCondition right, BoundaryCondition cut_bc, double lambda1,
                             double lambda2, const CountOptions& opt = {});

}  // namespace diracgap
