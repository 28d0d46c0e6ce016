#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diracgap/counting.hpp"
#include "diracgap/parallel.hpp"
#include "diracgap/potentials.hpp"

namespace diracgap {

/// k(lambda2, l0(rho)) - k(lambda1, l0(rho)) for the periodic background
/// coupled with the constant l0(rho).
double density_integrand(const DiracSystem& background, double lambda1, double lambda2,
                         const PerturbationTemplate& tmpl, double rho,
                         const StepControl& ctrl = {});

struct SupportBracket {
  bool empty = true;
  double rho_lo = 0.0;
  double rho_hi = 0.0;
  std::vector<std::string> warnings;
};

struct SupportOptions {
  int scan_points = 256;
  int verify_factor = 4;
  StepControl ctrl{};
  Execution exec = Execution::parallel;
};

/// Bracket [rho_lo, rho_hi] outside of which the integrand vanishes on the
/// scan and verification grids (geometric in rho, hence in l for power laws).
SupportBracket support_bounds(const DiracSystem& background, double lambda1, double lambda2,
                              const PerturbationTemplate& tmpl, double rho_min, double rho_max,
                              const SupportOptions& opt = {});

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

/// Adaptive Simpson on [a, b], split first at `breaks` and then into
/// `panels` equal panels per piece. Each panel refines independently with a
/// fixed rule, so the result does not depend on the execution order.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  std::span<const double> breaks, int panels, double tol,
                                  int max_depth, Execution exec);

struct QuadratureOptions {
  int panels = 16;
  double tol = 1e-9;
  int max_depth = 40;
  int kink_scan_points = 256;
  StepControl ctrl{};
  Execution exec = Execution::parallel;
};

struct DensityPrediction {
  double value = 0.0;  ///< eigenvalues per unit c
  double rho_lo = 0.0;
  double rho_hi = 0.0;
  int nodes = 0;
  double error_estimate = 0.0;
  std::vector<double> kinks;  ///< rho where a band edge of the l0(rho)-coupled system crosses lambda_i
  std::vector<std::string> warnings;
};

/// (1 / (alpha pi)) * integral of density_integrand over the support.
DensityPrediction predicted_density(const DiracSystem& background, double lambda1, double lambda2,
                                    const PerturbationTemplate& tmpl, const SupportBracket& support,
                                    const QuadratureOptions& opt = {});

struct ConvergenceRow {
  double c = 0.0;
  long N = 0;
  double N_over_c = 0.0;
  double predicted = 0.0;
  double ratio = 0.0;  ///< N / (c predicted); NaN when predicted == 0
  double budget_over_c = 0.0;
  int error_budget = 0;
  double r_inner = 0.0;
  double r_outer = 0.0;
  std::string error;  ///< non-empty if this c failed
};

struct Verdict {
  bool error_decreasing = false;  ///< |N/c - predicted| non-increasing along the rows
  double final_ratio = 0.0;
  bool within_band = false;
  std::string summary;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::optional<Verdict> verdict;  ///< absent with fewer than two successful rows
};

struct ExperimentOptions {
  double acceptance_band = 0.15;
  HalfLineOptions halfline{};
  Execution exec = Execution::parallel;
};

/// One half-line count per c (in the given, increasing order) against the
/// predicted density. Per-c failures are recorded in the row.
ConvergenceReport convergence_experiment(const DiracSystem& background,
                                         const PerturbationTemplate& tmpl, double lambda1,
                                         double lambda2, std::span<const double> c_list,
                                         const TruncationPlan& plan, double predicted,
                                         const ExperimentOptions& opt = {});

}  // namespace diracgap
