#include "diracgap/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "diracgap/errors.hpp"
#include "diracgap/floquet.hpp"

namespace diracgap {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> geometric_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = (i == n - 1) ? hi : lo * std::exp(step * i);
  return g;
}

/// Returns (inside, outside) after shrinking the bracket between a point
/// where pred holds and one where it does not.
template <class Pred>
std::pair<double, double> bisect(double inside, double outside, Pred&& pred) {
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (inside + outside);
    if (m == inside || m == outside || std::abs(outside - inside) <= 1e-13 * std::abs(m)) break;
    (pred(m) ? inside : outside) = m;
  }
  return {inside, outside};
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

double density_integrand(const DiracSystem& background, double lambda1, double lambda2,
                         const PerturbationTemplate& tmpl, double rho, const StepControl& ctrl) {
  if (!(lambda1 <= lambda2)) throw PreconditionError("density_integrand requires lambda1 <= lambda2");
  if (lambda1 == lambda2) return 0.0;
  const DiracSystem sys = background.with_coupling(tmpl.value(rho));
  return quasimomentum(sys, lambda2, ctrl) - quasimomentum(sys, lambda1, ctrl);
}

SupportBracket support_bounds(const DiracSystem& background, double lambda1, double lambda2,
                              const PerturbationTemplate& tmpl, double rho_min, double rho_max,
                              const SupportOptions& opt) {
  if (!(rho_min > 0.0 && rho_max > rho_min))
    throw PreconditionError("support_bounds requires 0 < rho_min < rho_max");
  if (opt.scan_points < 2) throw PreconditionError("support_bounds needs at least two scan points");
  auto nonzero = [&](double rho) {
    return density_integrand(background, lambda1, lambda2, tmpl, rho, opt.ctrl) != 0.0;
  };
  auto scan = [&](const std::vector<double>& g) {
    return parallel_map(g.size(), [&](std::size_t i) { return nonzero(g[i]) ? 1 : 0; }, opt.exec);
  };

  SupportBracket s;
  const auto grid = geometric_grid(rho_min, rho_max, opt.scan_points);
  const auto hit = scan(grid);
  auto first = std::find(hit.begin(), hit.end(), 1);
  if (first != hit.end()) {
    const std::size_t i0 = static_cast<std::size_t>(first - hit.begin());
    const std::size_t i1 =
        hit.size() - 1 - static_cast<std::size_t>(std::find(hit.rbegin(), hit.rend(), 1) - hit.rbegin());
    s.empty = false;
    s.rho_lo = i0 == 0 ? rho_min : bisect(grid[i0], grid[i0 - 1], nonzero).second;
    s.rho_hi = i1 + 1 == grid.size() ? rho_max : bisect(grid[i1], grid[i1 + 1], nonzero).second;
  }

  // Verification on a finer grid outside the bracket.
  const int nv = std::max(opt.scan_points * std::max(opt.verify_factor, 1), 2);
  auto fine = geometric_grid(rho_min, rho_max, nv);
  std::vector<double> outside;
  for (double r : fine)
    if (s.empty || r < s.rho_lo || r > s.rho_hi) outside.push_back(r);
  const auto vhit = scan(outside);
  for (std::size_t i = 0; i < outside.size(); ++i) {
    if (!vhit[i]) continue;
    const double r = outside[i];
    s.warnings.push_back("integrand nonzero at rho = " + fmt(r) + " outside the scanned bracket");
    if (s.empty) {
      s.empty = false;
      s.rho_lo = s.rho_hi = r;
    }
    s.rho_lo = std::min(s.rho_lo, r);
    s.rho_hi = std::max(s.rho_hi, r);
  }
  if (!s.empty) {
    if (nonzero(rho_min) || s.rho_lo <= rho_min)
      s.warnings.push_back("integrand nonzero at the lower end of the search window; support not captured");
    if (nonzero(rho_max) || s.rho_hi >= rho_max)
      s.warnings.push_back("integrand nonzero at the upper end of the search window; support not captured");
  }
  return s;
}

namespace {

struct Panel {
  double value, error;
  int evals;
};

Panel simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                  double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return {left + right + delta / 15.0, std::abs(delta) / 15.0, 2};
  const Panel l = simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
  const Panel r = simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  return {l.value + r.value, l.error + r.error, l.evals + r.evals + 2};
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  std::span<const double> breaks, int panels, double tol,
                                  int max_depth, Execution exec) {
  QuadratureResult out;
  if (!(b > a)) return out;
  std::vector<double> cuts{a};
  std::vector<double> inner(breaks.begin(), breaks.end());
  std::sort(inner.begin(), inner.end());
  for (double x : inner)
    if (x > cuts.back() && x < b) cuts.push_back(x);
  cuts.push_back(b);
  panels = std::max(panels, 1);
  std::vector<std::pair<double, double>> work;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    for (int k = 0; k < panels; ++k) {
      const double lo = cuts[i] + (cuts[i + 1] - cuts[i]) * k / panels;
      const double hi = k + 1 == panels ? cuts[i + 1] : cuts[i] + (cuts[i + 1] - cuts[i]) * (k + 1) / panels;
      work.emplace_back(lo, hi);
    }
  const double total = b - a;
  const auto res = parallel_map(
      work.size(),
      [&](std::size_t i) {
        const auto [lo, hi] = work[i];
        const double fa = f(lo), fm = f(0.5 * (lo + hi)), fb = f(hi);
        const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        Panel p = simpson_rec(f, lo, hi, fa, fm, fb, whole, tol * (hi - lo) / total, max_depth);
        p.evals += 3;
        return p;
      },
      exec);
  for (const auto& p : res) {
    out.value += p.value;
    out.error += p.error;
    out.evaluations += p.evals;
  }
  return out;
}

DensityPrediction predicted_density(const DiracSystem& background, double lambda1, double lambda2,
                                    const PerturbationTemplate& tmpl, const SupportBracket& support,
                                    const QuadratureOptions& opt) {
  DensityPrediction d;
  d.warnings = support.warnings;
  if (support.empty) return d;
  d.rho_lo = support.rho_lo;
  d.rho_hi = support.rho_hi;
  if (!(d.rho_hi > d.rho_lo)) return d;

  // Kinks: band edges of the l0(rho)-coupled system crossing lambda1 or lambda2.
  const int nk = std::max(opt.kink_scan_points, 2);
  const auto grid = geometric_grid(d.rho_lo, d.rho_hi, nk);
  for (double lam : {lambda1, lambda2}) {
    auto g = [&](double rho) {
      return std::abs(discriminant(background.with_coupling(tmpl.value(rho)), lam, opt.ctrl)) - 2.0;
    };
    const auto vals = parallel_map(grid.size(), [&](std::size_t i) { return g(grid[i]); }, opt.exec);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      if ((vals[i] > 0.0) == (vals[i + 1] > 0.0)) continue;
      const bool left_gap = vals[i] > 0.0;
      const auto [in, out] = bisect(grid[i], grid[i + 1], [&](double r) { return (g(r) > 0.0) == left_gap; });
      d.kinks.push_back(0.5 * (in + out));
    }
  }
  std::sort(d.kinks.begin(), d.kinks.end());

  const std::function<double(double)> f = [&](double rho) {
    return density_integrand(background, lambda1, lambda2, tmpl, rho, opt.ctrl);
  };
  const QuadratureResult q =
      adaptive_simpson(f, d.rho_lo, d.rho_hi, d.kinks, opt.panels, opt.tol, opt.max_depth, opt.exec);
  const double scale = 1.0 / (background.period() * kPi);
  d.value = q.value * scale;
  d.error_estimate = q.error * scale;
  d.nodes = q.evaluations;
  return d;
}

ConvergenceReport convergence_experiment(const DiracSystem& background,
                                         const PerturbationTemplate& tmpl, double lambda1,
                                         double lambda2, std::span<const double> c_list,
                                         const TruncationPlan& plan, double predicted,
                                         const ExperimentOptions& opt) {
  for (std::size_t i = 1; i < c_list.size(); ++i)
    if (!(c_list[i] > c_list[i - 1])) throw PreconditionError("c_list must be strictly increasing");

  ConvergenceReport rep;
  rep.rows = parallel_map(
      c_list.size(),
      [&](std::size_t i) {
        ConvergenceRow row;
        row.c = c_list[i];
        row.predicted = predicted;
        try {
          const CountResult r =
              count_halfline(background, tmpl, row.c, lambda1, lambda2, plan, opt.halfline);
          row.N = r.N;
          row.error_budget = r.error_budget;
          row.r_inner = r.a;
          row.r_outer = r.b;
          row.N_over_c = static_cast<double>(r.N) / row.c;
          row.ratio = predicted > 0.0 ? row.N_over_c / predicted
                                      : std::numeric_limits<double>::quiet_NaN();
          row.budget_over_c = r.error_budget / row.c;
        } catch (const std::exception& e) {
          row.error = e.what();
        }
        return row;
      },
      opt.exec);

  std::vector<const ConvergenceRow*> ok;
  for (const auto& r : rep.rows)
    if (r.error.empty()) ok.push_back(&r);
  if (ok.size() >= 2) {
    Verdict v;
    v.error_decreasing = true;
    for (std::size_t i = 1; i < ok.size(); ++i)
      if (std::abs(ok[i]->N_over_c - predicted) > std::abs(ok[i - 1]->N_over_c - predicted))
        v.error_decreasing = false;
    const ConvergenceRow& last = *ok.back();
    v.final_ratio = last.ratio;
    v.within_band = predicted > 0.0 ? std::abs(last.ratio - 1.0) <= opt.acceptance_band
                                    : last.N <= last.error_budget;
    std::ostringstream os;
    os << (v.error_decreasing ? "|N/c - predicted| non-increasing" : "|N/c - predicted| not monotone")
       << "; final c = " << last.c << ", N/c = " << last.N_over_c;
    if (predicted > 0.0) os << ", ratio = " << last.ratio;
    os << (v.within_band ? " (within acceptance band)" : " (outside acceptance band)");
    v.summary = os.str();
    rep.verdict = v;
  }
  return rep;
}

}  // namespace diracgap
