#include "diracgap/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>

#include "diracgap/errors.hpp"

namespace diracgap {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
}

// Rejects keys outside `allowed`, so typos do not pass silently.
void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  expect_object(j, where);
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(where, "unknown key '" + key + "'");
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "must be finite");
  return v;
}

double number_or(const json& j, const char* key, const std::string& where, double dflt) {
  return j.contains(key) ? number(j.at(key), where + "." + key) : dflt;
}

double required(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail(where, std::string("missing '") + key + "'");
  return number(j.at(key), where + "." + key);
}

int integer_or(const json& j, const char* key, const std::string& where, int dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(where + "." + key, "expected an integer");
  return v.get<int>();
}

std::string string_of(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_string())
    fail(where, std::string("missing string '") + key + "'");
  return j.at(key).get<std::string>();
}

void positive(double v, const std::string& where) {
  if (!(v > 0.0)) fail(where, "must be positive");
}

std::vector<double> number_list(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::pair<double, double>> pair_list(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of pairs");
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2) fail(w, "expected a pair");
    out.emplace_back(number(j[i][0], w), number(j[i][1], w));
  }
  return out;
}

PeriodicPotential parse_potential(const json& j) {
  const std::string w = "system.potential";
  expect_object(j, w);
  const std::string kind = string_of(j, "kind", w);
  if (kind == "piecewise_constant") {
    check_keys(j, w, {"kind", "segments"});
    if (!j.contains("segments")) fail(w, "missing 'segments'");
    std::vector<Segment> segs;
    for (auto [len, val] : pair_list(j.at("segments"), w + ".segments")) {
      positive(len, w + ".segments length");
      segs.push_back({len, val});
    }
    if (segs.empty()) fail(w, "needs at least one segment");
    return PeriodicPotential::piecewise_constant(std::move(segs));
  }
  if (kind == "cosine") {
    check_keys(j, w, {"kind", "period", "offset", "terms"});
    double period = required(j, "period", w);
    positive(period, w + ".period");
    std::vector<CosineTerm> terms;
    if (j.contains("terms")) {
      for (auto [f, a] : pair_list(j.at("terms"), w + ".terms")) {
        if (f < 1 || f != std::floor(f)) fail(w + ".terms", "frequency must be a positive integer");
        terms.push_back({static_cast<int>(f), a});
      }
    }
    return PeriodicPotential::cosine_series(period, std::move(terms), number_or(j, "offset", w, 0.0));
  }
  if (kind == "samples") {
    check_keys(j, w, {"kind", "period", "values"});
    double period = required(j, "period", w);
    positive(period, w + ".period");
    if (!j.contains("values")) fail(w, "missing 'values'");
    auto values = number_list(j.at("values"), w + ".values");
    if (values.size() < 2) fail(w + ".values", "needs at least two samples");
    return PeriodicPotential::samples(period, std::move(values));
  }
  if (kind == "constant" || kind == "free") {
    check_keys(j, w, {"kind", "period", "value"});
    double period = number_or(j, "period", w, 1.0);
    positive(period, w + ".period");
    double value = kind == "free" ? 0.0 : required(j, "value", w);
    if (kind == "free" && j.contains("value")) fail(w, "'free' takes no value");
    return PeriodicPotential::constant(period, value);
  }
  fail(w + ".kind", "unknown potential kind '" + kind + "'");
}

std::vector<std::pair<double, double>> read_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("template.table_path", "cannot open " + path.string());
  std::vector<std::pair<double, double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double r, v;
    if (!(ss >> r >> v)) {
      if (rows.empty() && lineno == 1) continue;  // header
      fail("template.table_path", path.string() + ":" + std::to_string(lineno) + ": bad row");
    }
    rows.emplace_back(r, v);
  }
  return rows;
}

PerturbationTemplate parse_template(const json& j, const std::filesystem::path& base) {
  const std::string w = "template";
  expect_object(j, w);
  const std::string kind = string_of(j, "kind", w);
  if (kind == "inverse_power") {
    check_keys(j, w, {"kind", "beta"});
    double beta = number_or(j, "beta", w, 1.0);
    positive(beta, w + ".beta");
    return PerturbationTemplate::inverse_power(beta);
  }
  if (kind == "tabulated") {
    check_keys(j, w, {"kind", "table", "table_path"});
    std::vector<std::pair<double, double>> rows;
    if (j.contains("table") == j.contains("table_path"))
      fail(w, "give exactly one of 'table' and 'table_path'");
    if (j.contains("table")) {
      rows = pair_list(j.at("table"), w + ".table");
    } else {
      if (!j.at("table_path").is_string()) fail(w + ".table_path", "expected a string");
      std::filesystem::path p = j.at("table_path").get<std::string>();
      rows = read_table_csv(p.is_absolute() ? p : base / p);
    }
    if (rows.size() < 2) fail(w, "table needs at least two rows");
    std::vector<double> rho, val;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!(rows[i].first > 0.0)) fail(w, "table rho must be positive");
      if (i > 0 && !(rows[i].first > rows[i - 1].first)) fail(w, "table rho must increase");
      rho.push_back(rows[i].first);
      val.push_back(rows[i].second);
    }
    return PerturbationTemplate::tabulated(std::move(rho), std::move(val));
  }
  fail(w + ".kind", "unknown template kind '" + kind + "'");
}

BoundaryCondition parse_bc(const json& j, const std::string& where) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "u2_zero") return BoundaryCondition::u2_zero();
    if (s == "sum_zero") return BoundaryCondition::sum_zero();
    fail(where, "unknown boundary condition '" + s + "'");
  }
  return BoundaryCondition::angle(number(j, where));
}

}  // namespace

std::vector<double> LambdaGrid::points() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out.push_back(count == 1 ? min : min + (max - min) * i / (count - 1));
  return out;
}

RunConfig RunConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  check_keys(j, "config", {"system", "template", "window", "numeric", "experiment"});
  if (!j.contains("system")) fail("config", "missing 'system'");

  const json& js = j.at("system");
  check_keys(js, "system", {"mass", "potential", "sup_norm"});
  double mass = number_or(js, "mass", "system", 1.0);
  positive(mass, "system.mass");
  if (!js.contains("potential")) fail("system", "missing 'potential'");
  PeriodicPotential q = parse_potential(js.at("potential"));
  if (js.contains("sup_norm")) {
    double s = number(js.at("sup_norm"), "system.sup_norm");
    if (s < q.sup_norm()) fail("system.sup_norm", "below the computed bound");
    q = q.with_sup_norm(s);
  }

  NumericConfig num;
  if (j.contains("numeric")) {
    const json& jn = j.at("numeric");
    const std::string w = "numeric";
    check_keys(jn, w,
               {"tol", "steps_per_period", "count_tol", "band_points_per_unit", "quadrature_panels",
                "quadrature_tol", "outer_margin", "acceptance_band", "C", "rho_min", "rho_hat",
                "h_grid", "escalate_warnings"});
    num.tol = number_or(jn, "tol", w, num.tol);
    num.steps_per_period = integer_or(jn, "steps_per_period", w, num.steps_per_period);
    num.count_tol = number_or(jn, "count_tol", w, num.count_tol);
    num.band_points_per_unit = number_or(jn, "band_points_per_unit", w, num.band_points_per_unit);
    num.quadrature_panels = integer_or(jn, "quadrature_panels", w, num.quadrature_panels);
    num.quadrature_tol = number_or(jn, "quadrature_tol", w, num.quadrature_tol);
    num.outer_margin = number_or(jn, "outer_margin", w, num.outer_margin);
    num.acceptance_band = number_or(jn, "acceptance_band", w, num.acceptance_band);
    if (jn.contains("C")) num.C = number(jn.at("C"), w + ".C");
    num.rho_min = number_or(jn, "rho_min", w, num.rho_min);
    num.rho_hat = number_or(jn, "rho_hat", w, num.rho_hat);
    num.h_grid = integer_or(jn, "h_grid", w, num.h_grid);
    if (jn.contains("escalate_warnings")) {
      if (!jn.at("escalate_warnings").is_boolean()) fail(w + ".escalate_warnings", "expected a boolean");
      num.escalate_warnings = jn.at("escalate_warnings").get<bool>();
    }
    positive(num.tol, w + ".tol");
    positive(num.count_tol, w + ".count_tol");
    positive(num.quadrature_tol, w + ".quadrature_tol");
    positive(num.band_points_per_unit, w + ".band_points_per_unit");
    positive(num.acceptance_band, w + ".acceptance_band");
    if (num.steps_per_period < 1) fail(w + ".steps_per_period", "must be at least 1");
    if (num.quadrature_panels < 1) fail(w + ".quadrature_panels", "must be at least 1");
    if (num.h_grid < 3) fail(w + ".h_grid", "must be at least 3");
    if (!(num.outer_margin >= 1.0)) fail(w + ".outer_margin", "must be at least 1");
    if (num.C && !(*num.C >= 0.0)) fail(w + ".C", "must be non-negative");
    positive(num.rho_min, w + ".rho_min");
    if (!(num.rho_hat > num.rho_min)) fail(w + ".rho_hat", "must exceed rho_min");
  }

  ExperimentConfig exp;
  if (j.contains("experiment")) {
    const json& je = j.at("experiment");
    const std::string w = "experiment";
    check_keys(je, w,
               {"c_list", "lambda_grid", "interval", "l", "bc_left", "bc_right", "inner_bc",
                "outer_bc", "n_periods"});
    if (je.contains("c_list")) {
      exp.c_list = number_list(je.at("c_list"), w + ".c_list");
      for (std::size_t i = 0; i < exp.c_list.size(); ++i) {
        positive(exp.c_list[i], w + ".c_list");
        if (i > 0 && !(exp.c_list[i] > exp.c_list[i - 1]))
          fail(w + ".c_list", "must be strictly increasing");
      }
    }
    if (je.contains("lambda_grid")) {
      const json& g = je.at("lambda_grid");
      check_keys(g, w + ".lambda_grid", {"min", "max", "count"});
      LambdaGrid grid;
      grid.min = required(g, "min", w + ".lambda_grid");
      grid.max = required(g, "max", w + ".lambda_grid");
      grid.count = integer_or(g, "count", w + ".lambda_grid", 0);
      if (grid.count < 0) fail(w + ".lambda_grid.count", "must be non-negative");
      if (grid.max < grid.min) fail(w + ".lambda_grid", "max below min");
      exp.lambda_grid = grid;
    }
    if (je.contains("interval")) {
      auto v = number_list(je.at("interval"), w + ".interval");
      if (v.size() != 2 || !(v[1] > v[0])) fail(w + ".interval", "expected [a, b] with a < b");
      exp.interval = std::pair{v[0], v[1]};
    }
    exp.l = number_or(je, "l", w, 0.0);
    if (je.contains("bc_left")) exp.bc_left = parse_bc(je.at("bc_left"), w + ".bc_left");
    if (je.contains("bc_right")) exp.bc_right = parse_bc(je.at("bc_right"), w + ".bc_right");
    if (je.contains("inner_bc")) exp.inner_bc = parse_bc(je.at("inner_bc"), w + ".inner_bc");
    if (je.contains("outer_bc")) exp.outer_bc = parse_bc(je.at("outer_bc"), w + ".outer_bc");
    exp.n_periods = integer_or(je, "n_periods", w, exp.n_periods);
    if (exp.n_periods < 1) fail(w + ".n_periods", "must be at least 1");
  }

  std::optional<WindowConfig> window;
  if (j.contains("window")) {
    const json& jw = j.at("window");
    check_keys(jw, "window", {"lambda1", "lambda2", "gap_margin"});
    WindowConfig wc;
    wc.lambda1 = required(jw, "lambda1", "window");
    wc.lambda2 = required(jw, "lambda2", "window");
    wc.gap_margin = number_or(jw, "gap_margin", "window", wc.gap_margin);
    if (wc.lambda2 < wc.lambda1) fail("window", "lambda2 below lambda1");
    if (!(wc.gap_margin > 0.0 && wc.gap_margin < 1.0)) fail("window.gap_margin", "must lie in (0, 1)");
    window = wc;
  }

  std::optional<PerturbationTemplate> tmpl;
  if (j.contains("template")) tmpl = parse_template(j.at("template"), base_dir);

  return RunConfig{DiracSystem(mass, std::move(q), Coupling::constant(exp.l)), std::move(tmpl),
                   window, num, std::move(exp)};
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

StepControl RunConfig::band_control() const {
  StepControl c;
  c.tol = numeric.tol;
  c.steps_per_period = numeric.steps_per_period;
  return c;
}

CountOptions RunConfig::count_options() const {
  CountOptions o;
  o.ctrl.tol = numeric.count_tol;
  o.ctrl.steps_per_period = numeric.steps_per_period;
  return o;
}

}  // namespace diracgap
