#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "diracgap/counting.hpp"
#include "diracgap/potentials.hpp"
#include "json.hpp"

namespace diracgap {

struct WindowConfig {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double gap_margin = 0.1;
};

struct NumericConfig {
  double tol = 1e-10;             ///< band / quasimomentum integration
  int steps_per_period = 16;
  double count_tol = 1e-7;        ///< Prufer shooting for counts
  double band_points_per_unit = 512.0;
  int quadrature_panels = 16;
  double quadrature_tol = 1e-9;
  double outer_margin = 4.0;
  double acceptance_band = 0.15;
  std::optional<double> C;        ///< overrides the estimate from the hypothesis check
  double rho_min = 1e-4;          ///< hypothesis check grid
  double rho_hat = 1.0;
  int h_grid = 2001;
  bool escalate_warnings = false;
};

struct LambdaGrid {
  double min = 0.0;
  double max = 0.0;
  int count = 0;

  std::vector<double> points() const;
};

struct ExperimentConfig {
  std::vector<double> c_list;
  std::optional<LambdaGrid> lambda_grid;
  std::optional<std::pair<double, double>> interval;
  double l = 0.0;
  BoundaryCondition bc_left = BoundaryCondition::u2_zero();
  BoundaryCondition bc_right = BoundaryCondition::u2_zero();
  BoundaryCondition inner_bc = BoundaryCondition::sum_zero();
  BoundaryCondition outer_bc = BoundaryCondition::u2_zero();
  int n_periods = 2000;
};

/// Parsed and validated run configuration (JSON; schema in README).
struct RunConfig {
  DiracSystem system;  ///< coupling set to the constant experiment.l
  std::optional<PerturbationTemplate> tmpl;
  std::optional<WindowConfig> window;
  NumericConfig numeric;
  ExperimentConfig experiment;

  /// Throws ConfigError on any schema or range violation. Relative table
  /// paths are resolved against base_dir.
  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static RunConfig load(const std::filesystem::path& path);

  StepControl band_control() const;
  CountOptions count_options() const;
};

}  // namespace diracgap
