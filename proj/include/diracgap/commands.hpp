#pragma once

#include <string>
#include <vector>

#include "diracgap/config.hpp"
#include "json.hpp"

namespace diracgap {

/// What a command produced. The CLI writes `csv` to --out (or stdout) and
/// `summary` to the summary path; `warnings` are escalated to exit code 3
/// when numeric.escalate_warnings is set.
struct CommandOutput {
  std::string csv;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> warnings;
};

/// lambda,D,k,in_band over experiment.lambda_grid.
CommandOutput cmd_bands(const RunConfig& cfg);
/// lambda,D,k,rotation_number over experiment.lambda_grid.
CommandOutput cmd_quasimomentum(const RunConfig& cfg);
/// c,lambda1,lambda2,N,error_budget,r_inner,r_outer. Uses experiment.interval
/// with the constant coupling experiment.l when given, otherwise one
/// half-line count per entry of experiment.c_list.
CommandOutput cmd_count(const RunConfig& cfg);
/// c,N,N_over_c,predicted,ratio,budget_over_c plus a JSON summary.
CommandOutput cmd_asymptotics(const RunConfig& cfg);
/// Hypothesis check on the template and gap containment of the window.
CommandOutput cmd_validate(const RunConfig& cfg);

/// C used for planning: numeric.C if set, else the template estimate rounded
/// up to 1e-6.
double planning_constant(const RunConfig& cfg);

/// Shortest round-trip-safe formatting used in every CSV ("%.12g", "nan").
std::string format_number(double v);

}  // namespace diracgap
