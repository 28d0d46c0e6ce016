#include "diracgap/commands.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "diracgap/asymptotics.hpp"
#include "diracgap/errors.hpp"
#include "diracgap/floquet.hpp"
#include "diracgap/log.hpp"

namespace diracgap {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

class CsvWriter {
 public:
  explicit CsvWriter(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      os_ << (first ? "" : ",") << h;
      first = false;
    }
    os_ << '\n';
  }
  CsvWriter& cell(double v) { return raw(format_number(v)); }
  CsvWriter& cell(long v) { return raw(std::to_string(v)); }
  CsvWriter& cell(int v) { return raw(std::to_string(v)); }
  CsvWriter& raw(const std::string& s) {
    os_ << (fresh_ ? "" : ",") << s;
    fresh_ = false;
    return *this;
  }
  void end() {
    os_ << '\n';
    fresh_ = true;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
  bool fresh_ = true;
};

// JSON numbers cannot hold NaN; emit null instead.
json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

const LambdaGrid& need_grid(const RunConfig& cfg, const char* cmd) {
  if (!cfg.experiment.lambda_grid)
    throw ConfigError(std::string(cmd) + " needs experiment.lambda_grid");
  return *cfg.experiment.lambda_grid;
}

const WindowConfig& need_window(const RunConfig& cfg, const char* cmd) {
  if (!cfg.window) throw ConfigError(std::string(cmd) + " needs a window block");
  return *cfg.window;
}

const PerturbationTemplate& need_template(const RunConfig& cfg, const char* cmd) {
  if (!cfg.tmpl) throw ConfigError(std::string(cmd) + " needs a template block");
  return *cfg.tmpl;
}

BandScanOptions band_options(const RunConfig& cfg) {
  BandScanOptions o;
  o.points_per_unit = cfg.numeric.band_points_per_unit;
  o.ctrl = cfg.band_control();
  return o;
}

DiracSystem background(const RunConfig& cfg) { return cfg.system.with_coupling(0.0); }

TruncationPlan make_plan(const RunConfig& cfg, const char* cmd) {
  const auto& w = need_window(cfg, cmd);
  TruncationOptions o;
  o.outer_margin = cfg.numeric.outer_margin;
  o.band = band_options(cfg);
  return plan_truncation(background(cfg), need_template(cfg, cmd), w.lambda1, w.lambda2,
                         planning_constant(cfg), w.gap_margin, o);
}

void require_c_list(const RunConfig& cfg, const TruncationPlan& plan, const char* cmd) {
  const auto& cs = cfg.experiment.c_list;
  if (cs.empty()) throw ConfigError(std::string(cmd) + " needs experiment.c_list");
  if (cs.front() < plan.c0)
    throw PreconditionError("c = " + format_number(cs.front()) + " is below c0 = " +
                            format_number(plan.c0));
}

json plan_json(const TruncationPlan& p) {
  return {{"rho0", p.rho0},         {"P0", p.P0},
          {"rho_outer", p.rho_outer()}, {"threshold", p.threshold},
          {"C", p.C},               {"c0", p.c0},
          {"gap_margin", p.gap_margin}, {"inner_degenerate", p.inner_degenerate}};
}

HalfLineOptions halfline_options(const RunConfig& cfg) {
  HalfLineOptions h;
  h.inner = cfg.experiment.inner_bc;
  h.outer = cfg.experiment.outer_bc;
  h.count = cfg.count_options();
  return h;
}

void append(std::vector<std::string>& dst, const std::vector<std::string>& src,
            const std::string& prefix = {}) {
  for (const auto& s : src) dst.push_back(prefix + s);
}

}  // namespace

double planning_constant(const RunConfig& cfg) {
  if (cfg.numeric.C) return *cfg.numeric.C;
  const auto& t = need_template(cfg, "planning");
  const HCheckReport r = validate_template(t, cfg.numeric.rho_min, cfg.numeric.rho_hat, cfg.numeric.h_grid);
  // Round up so that estimates like 1 + 1e-16 plan with C = 1.
  return std::ceil(r.C_estimate * (1.0 - 1e-12) * 1e6) / 1e6;
}

CommandOutput cmd_bands(const RunConfig& cfg) {
  const auto& grid = need_grid(cfg, "bands");
  const auto lambdas = grid.points();
  const auto rows = sample_quasimomentum(cfg.system, lambdas, cfg.band_control(), Execution::parallel);

  CommandOutput out;
  CsvWriter csv{"lambda", "D", "k", "in_band"};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv.cell(lambdas[i]).cell(rows[i].D).cell(rows[i].k).cell(rows[i].in_band ? 1 : 0);
    csv.end();
  }
  out.csv = csv.str();

  if (grid.count > 1 && grid.max > grid.min) {
    const BandStructure bs = band_edges(cfg.system, grid.min, grid.max, band_options(cfg));
    json edges = json::array(), bands = json::array(), gaps = json::array();
    for (const auto& e : bs.edges) edges.push_back({{"lambda", e.lambda}, {"type", e.type}});
    for (const auto& b : bs.bands)
      bands.push_back({{"left", b.left}, {"right", b.right}, {"index", b.index}});
    for (const auto& g : bs.gaps)
      gaps.push_back({{"left", g.left}, {"right", g.right}, {"index", g.index}});
    out.summary = {{"coupling", bs.coupling}, {"edges", edges}, {"bands", bands}, {"gaps", gaps},
                   {"warnings", bs.warnings}};
    append(out.warnings, bs.warnings);
  }
  return out;
}

CommandOutput cmd_quasimomentum(const RunConfig& cfg) {
  const auto lambdas = need_grid(cfg, "quasimomentum").points();
  const StepControl ctrl = cfg.band_control();
  const auto qm = sample_quasimomentum(cfg.system, lambdas, ctrl, Execution::parallel);
  const int n = cfg.experiment.n_periods;
  const auto rot = parallel_map(
      lambdas.size(), [&](std::size_t i) { return rotation_number(cfg.system, lambdas[i], n, ctrl); },
      Execution::parallel);

  CommandOutput out;
  CsvWriter csv{"lambda", "D", "k", "rotation_number"};
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    csv.cell(lambdas[i]).cell(qm[i].D).cell(qm[i].k).cell(rot[i]);
    csv.end();
  }
  out.csv = csv.str();
  out.summary = {{"n_periods", n}, {"period", cfg.system.period()}};
  return out;
}

CommandOutput cmd_count(const RunConfig& cfg) {
  const auto& w = need_window(cfg, "count");
  CommandOutput out;
  CsvWriter csv{"c", "lambda1", "lambda2", "N", "error_budget", "r_inner", "r_outer"};
  auto row = [&](const CountResult& r) {
    csv.cell(r.c ? *r.c : std::nan("")).cell(r.lambda1).cell(r.lambda2).cell(r.N);
    csv.cell(r.error_budget).cell(r.a).cell(r.b);
    csv.end();
    append(out.warnings, r.warnings);
  };

  if (cfg.experiment.interval) {
    const auto [a, b] = *cfg.experiment.interval;
    row(count_interval(cfg.system, a, b, cfg.experiment.bc_left, cfg.experiment.bc_right,
                       w.lambda1, w.lambda2, cfg.count_options()));
    out.summary = {{"mode", "interval"}, {"l", cfg.experiment.l}};
  } else {
    const TruncationPlan plan = make_plan(cfg, "count");
    require_c_list(cfg, plan, "count");
    const auto& cs = cfg.experiment.c_list;
    const HalfLineOptions h = halfline_options(cfg);
    const auto results = parallel_map(
        cs.size(),
        [&](std::size_t i) {
          return count_halfline(background(cfg), *cfg.tmpl, cs[i], w.lambda1, w.lambda2, plan, h);
        },
        Execution::parallel);
    for (const auto& r : results) row(r);
    out.summary = {{"mode", "halfline"}, {"plan", plan_json(plan)}};
  }
  out.csv = csv.str();
  out.summary["warnings"] = out.warnings;
  return out;
}

CommandOutput cmd_asymptotics(const RunConfig& cfg) {
  const auto& w = need_window(cfg, "asymptotics");
  const auto& tmpl = need_template(cfg, "asymptotics");
  const TruncationPlan plan = make_plan(cfg, "asymptotics");
  require_c_list(cfg, plan, "asymptotics");
  const DiracSystem bg = background(cfg);
  const StepControl ctrl = cfg.band_control();

  // Beyond P0 the coupling stays below the gap margin and the window stays in
  // the gap; below rho0 (or the table start) the search is anchored at a tiny
  // fraction of P0.
  const double lo = plan.inner_degenerate ? plan.P0 * 1e-6 : plan.rho0;
  SupportOptions so;
  so.ctrl = ctrl;
  const SupportBracket support = support_bounds(bg, w.lambda1, w.lambda2, tmpl, lo, plan.P0, so);

  QuadratureOptions qo;
  qo.panels = cfg.numeric.quadrature_panels;
  qo.tol = cfg.numeric.quadrature_tol;
  qo.ctrl = ctrl;
  const DensityPrediction pred = predicted_density(bg, w.lambda1, w.lambda2, tmpl, support, qo);
  log::info("predicted density " + format_number(pred.value));

  ExperimentOptions eo;
  eo.acceptance_band = cfg.numeric.acceptance_band;
  eo.halfline = halfline_options(cfg);
  const ConvergenceReport rep =
      convergence_experiment(bg, tmpl, w.lambda1, w.lambda2, cfg.experiment.c_list, plan, pred.value, eo);

  CommandOutput out;
  CsvWriter csv{"c", "N", "N_over_c", "predicted", "ratio", "budget_over_c"};
  json rows = json::array();
  for (const auto& r : rep.rows) {
    if (!r.error.empty()) {
      out.warnings.push_back("c = " + format_number(r.c) + ": " + r.error);
      csv.cell(r.c).raw("nan").raw("nan").cell(r.predicted).raw("nan").raw("nan");
    } else {
      csv.cell(r.c).cell(r.N).cell(r.N_over_c).cell(r.predicted).cell(r.ratio).cell(r.budget_over_c);
    }
    csv.end();
  }
  out.csv = csv.str();

  append(out.warnings, support.warnings, "support: ");
  append(out.warnings, pred.warnings, "quadrature: ");

  json summary = {
      {"predicted_density", pred.value},
      {"quadrature_error", pred.error_estimate},
      {"quadrature_nodes", pred.nodes},
      {"support", {{"empty", support.empty},
                   {"rho_lo", jnum(support.empty ? NAN : support.rho_lo)},
                   {"rho_hi", jnum(support.empty ? NAN : support.rho_hi)}}},
      {"kinks", pred.kinks},
      {"plan", plan_json(plan)},
      {"template", tmpl.describe()},
      {"window", {{"lambda1", w.lambda1}, {"lambda2", w.lambda2}, {"gap_margin", w.gap_margin}}},
  };
  if (rep.verdict) {
    summary["verdict"] = {{"error_decreasing", rep.verdict->error_decreasing},
                          {"final_ratio", jnum(rep.verdict->final_ratio)},
                          {"within_band", rep.verdict->within_band},
                          {"acceptance_band", cfg.numeric.acceptance_band},
                          {"summary", rep.verdict->summary}};
  }

  // How much the inner condition matters: recount at the largest c with the
  // other standard choice.
  if (!plan.inner_degenerate && !rep.rows.empty() && rep.rows.back().error.empty()) {
    HalfLineOptions alt = halfline_options(cfg);
    const bool is_sum = std::abs(alt.inner.beta - BoundaryCondition::sum_zero().beta) < 1e-12;
    alt.inner = is_sum ? BoundaryCondition::u2_zero() : BoundaryCondition::sum_zero();
    const auto& last = rep.rows.back();
    const CountResult r = count_halfline(bg, tmpl, last.c, w.lambda1, w.lambda2, plan, alt);
    summary["inner_bc_sensitivity"] = {{"c", last.c},
                                       {"N", last.N},
                                       {"inner_beta", cfg.experiment.inner_bc.beta},
                                       {"N_alternative", r.N},
                                       {"alternative_beta", alt.inner.beta},
                                       {"difference", r.N - last.N}};
  }
  summary["warnings"] = out.warnings;
  out.summary = std::move(summary);
  return out;
}

CommandOutput cmd_validate(const RunConfig& cfg) {
  CommandOutput out;
  json s = json::object();
  if (cfg.tmpl) {
    const HCheckReport r =
        validate_template(*cfg.tmpl, cfg.numeric.rho_min, cfg.numeric.rho_hat, cfg.numeric.h_grid);
    s["h_check"] = {{"passes", r.passes},
                    {"C_estimate", r.C_estimate},
                    {"refinements", r.refinements},
                    {"rho_min", cfg.numeric.rho_min},
                    {"rho_hat", cfg.numeric.rho_hat},
                    {"template", cfg.tmpl->describe()}};
    const double C = planning_constant(cfg);
    s["C"] = C;
    s["c0"] = C + 1.0;
  }
  if (cfg.window) {
    const auto& w = *cfg.window;
    const double lo = w.lambda1 - w.gap_margin, hi = w.lambda2 + w.gap_margin;
    const BandStructure bs = band_edges(background(cfg), lo, hi, band_options(cfg));
    const bool inside = bs.edges.empty() && bs.bands.empty() && bs.gaps.size() == 1 && bs.warnings.empty();
    json edges = json::array();
    for (const auto& e : bs.edges) edges.push_back(e.lambda);
    s["gap_containment"] = {{"inside_gap", inside},
                            {"checked", {lo, hi}},
                            {"gap_index", inside ? json(bs.gaps.front().index) : json(nullptr)},
                            {"edges_in_range", edges},
                            {"warnings", bs.warnings}};
    append(out.warnings, bs.warnings);
  }
  out.summary = std::move(s);
  return out;
}

}  // namespace diracgap
