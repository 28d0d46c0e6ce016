#include "diracgap/counting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "diracgap/errors.hpp"

namespace diracgap {

namespace {
constexpr double kPi = std::numbers::pi;
}

BoundaryCondition BoundaryCondition::angle(double beta) {
  if (!std::isfinite(beta)) throw ConfigError("boundary angle must be finite");
  double b = std::fmod(beta, kPi);
  if (b < 0.0) b += kPi;
  if (b >= kPi) b = 0.0;
  return {b};
}

BoundaryCondition BoundaryCondition::sum_zero() { return {0.25 * kPi}; }

double shoot_angle(const DiracSystem& sys, double a, double b, BoundaryCondition left,
                   double lambda, const StepControl& ctrl) {
  if (!(a < b)) throw PreconditionError("shoot_angle requires a < b");
  return propagate_prufer(sys, lambda, left.beta, a, b, ctrl).theta;
}

CountResult count_interval(const DiracSystem& sys, double a, double b, BoundaryCondition left,
                           BoundaryCondition right, double lambda1, double lambda2,
                           const CountOptions& opt) {
  if (!(a < b)) throw PreconditionError("count_interval requires a < b");
  if (!(lambda1 <= lambda2)) throw PreconditionError("count_interval requires lambda1 <= lambda2");
  CountResult r;
  r.lambda1 = lambda1;
  r.lambda2 = lambda2;
  r.a = a;
  r.b = b;
  r.theta1 = shoot_angle(sys, a, b, left, lambda1, opt.ctrl);
  r.theta2 = lambda2 == lambda1 ? r.theta1 : shoot_angle(sys, a, b, left, lambda2, opt.ctrl);
  if (r.theta2 < r.theta1)
    throw NumericalError("Prufer angle decreased in lambda; integration is not resolved");
  const double s1 = (r.theta1 - right.beta) / kPi;
  const double s2 = (r.theta2 - right.beta) / kPi;
  r.N = static_cast<long>(std::floor(s2) - std::floor(s1));
  for (auto [s, lam] : {std::pair{s1, lambda1}, std::pair{s2, lambda2}}) {
    if (std::abs(s - std::round(s)) * kPi < opt.ambiguity) {
      ++r.error_budget;
      std::ostringstream os;
      os << "eigenvalue at window end lambda = " << lam << "; count ambiguous by 1";
      r.warnings.push_back(os.str());
    }
  }
  if (lambda1 == lambda2 && r.error_budget > 1) r.error_budget = 1;
  return r;
}

LimitTable density_of_states_limit(const DiracSystem& sys, BoundaryCondition left, BoundaryCondition right,
                            double lambda1, double lambda2, std::span<const double> lengths,
                            const CountOptions& opt, Execution exec) {
  if (!sys.coupling.is_constant())
    throw PreconditionError("density_of_states_limit requires a constant coupling");
  LimitTable t;
  t.limit = (quasimomentum(sys, lambda2, opt.ctrl) - quasimomentum(sys, lambda1, opt.ctrl)) /
            (sys.period() * kPi);
  t.rows = parallel_map(
      lengths.size(),
      [&](std::size_t i) {
        const CountResult r = count_interval(sys, 0.0, lengths[i], left, right, lambda1, lambda2, opt);
        return LimitRow{lengths[i], r.N, static_cast<double>(r.N) / lengths[i]};
      },
      exec);
  return t;
}

namespace {

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  const int n = std::max(2, static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade)) + 1);
  std::vector<double> g(static_cast<std::size_t>(n));
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = (i == n - 1) ? hi : lo * std::exp(step * i);
  return g;
}

/// Boundary between x_true (pred holds) and x_false, to relative 1e-13.
template <class Pred>
double bisect_boundary(double x_true, double x_false, Pred&& pred) {
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (x_true + x_false);
    if (m == x_true || m == x_false) break;
    if (std::abs(x_false - x_true) <= 1e-13 * std::abs(m)) break;
    (pred(m) ? x_true : x_false) = m;
  }
  return x_true;
}

}  // namespace

TruncationPlan plan_truncation(const DiracSystem& background, const PerturbationTemplate& tmpl,
                               double lambda1, double lambda2, double C, double gap_margin,
                               const TruncationOptions& opt) {
  if (!(lambda1 <= lambda2)) throw PreconditionError("plan_truncation requires lambda1 <= lambda2");
  if (!(C >= 0.0) || !std::isfinite(C)) throw PreconditionError("hypothesis constant C must be >= 0");
  if (!(gap_margin > 0.0 && gap_margin < 1.0))
    throw PreconditionError("gap margin must lie in (0, 1)");
  if (!(opt.outer_margin >= 1.0)) throw PreconditionError("outer margin must be >= 1");

  const DiracSystem unperturbed = background.with_coupling(0.0);
  const BandStructure bs =
      band_edges(unperturbed, lambda1 - gap_margin, lambda2 + gap_margin, opt.band);
  if (!bs.edges.empty() || bs.gaps.size() != 1 || !bs.bands.empty() || !bs.warnings.empty()) {
    std::ostringstream os;
    os << "window [" << lambda1 << ", " << lambda2 << "] widened by " << gap_margin
       << " is not strictly inside a spectral gap of the unperturbed system";
    throw PreconditionError(os.str());
  }

  TruncationPlan p;
  p.C = C;
  p.c0 = C + 1.0;
  p.gap_margin = gap_margin;
  p.outer_margin = opt.outer_margin;
  const double lam = std::max(std::abs(lambda1), std::abs(lambda2));
  p.threshold = std::pow(background.potential.sup_norm() + lam + 1.0, 2);

  const auto grid = log_grid(opt.rho_search_min, opt.rho_search_max, opt.points_per_decade);
  auto inner_ok = [&](double rho) {
    const double l = tmpl.value(rho);
    return l * l - std::abs(tmpl.derivative(rho)) / p.c0 >= p.threshold;
  };
  std::size_t first_fail = grid.size();
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!inner_ok(grid[i])) {
      first_fail = i;
      break;
    }
  if (first_fail == 0) {
    if (!tmpl.bounded_at_origin())
      throw PreconditionError("no inner cut certifies the near-origin criterion in the searched range");
    p.rho0 = 0.0;
    p.inner_degenerate = true;
  } else if (first_fail == grid.size()) {
    throw PreconditionError("near-origin criterion holds on the whole searched range; template does not decay");
  } else {
    p.rho0 = bisect_boundary(grid[first_fail - 1], grid[first_fail], inner_ok);
  }

  auto small = [&](double rho) { return std::abs(tmpl.value(rho)) < gap_margin; };
  if (!small(grid.back()))
    throw PreconditionError("template does not drop below the gap margin in the searched range");
  std::size_t last_big = grid.size();
  for (std::size_t i = grid.size(); i-- > 0;)
    if (!small(grid[i])) {
      last_big = i;
      break;
    }
  if (last_big == grid.size()) {
    p.P0 = opt.rho_search_min;
  } else {
    p.P0 = bisect_boundary(grid[last_big + 1], grid[last_big], small);
  }
  p.P0 = std::max(p.P0, p.rho0);
  return p;
}

CountResult count_halfline(const DiracSystem& background, const PerturbationTemplate& tmpl,
                           double c, double lambda1, double lambda2, const TruncationPlan& plan,
                           const HalfLineOptions& opt) {
  if (!(c >= plan.c0)) {
    std::ostringstream os;
    os << "count_halfline requires c >= c0 = " << plan.c0 << " (got c = " << c << ")";
    throw PreconditionError(os.str());
  }
  const DiracSystem sys = background.with_coupling(Coupling::scaled(tmpl, c));
  const double r_in = c * plan.rho0;
  const double r_out = c * plan.rho_outer();
  CountResult r = count_interval(sys, r_in, r_out, opt.inner, opt.outer, lambda1, lambda2, opt.count);
  r.c = c;
  r.error_budget += (plan.inner_degenerate ? 0 : 2) + 2 + 2;
  return r;
}

SplitCheck split_count_check(const DiracSystem& sys, double a, double b,
                             std::span<const double> cuts, BoundaryCondition left,
                             BoundaryCondition right, BoundaryCondition cut_bc, double lambda1,
                             double lambda2, const CountOptions& opt) {
  std::vector<double> pts(cuts.begin(), cuts.end());
  std::sort(pts.begin(), pts.end());
  for (double x : pts)
    if (!(x > a && x < b)) throw PreconditionError("split points must lie strictly inside (a, b)");
  if (std::adjacent_find(pts.begin(), pts.end()) != pts.end())
    throw PreconditionError("split points must be distinct");

  SplitCheck s;
  s.N_whole = count_interval(sys, a, b, left, right, lambda1, lambda2, opt).N;
  std::vector<double> ends{a};
  ends.insert(ends.end(), pts.begin(), pts.end());
  ends.push_back(b);
  long total = 0;
  for (std::size_t i = 0; i + 1 < ends.size(); ++i) {
    const BoundaryCondition l = i == 0 ? left : cut_bc;
    const BoundaryCondition r = i + 2 == ends.size() ? right : cut_bc;
    const long n = count_interval(sys, ends[i], ends[i + 1], l, r, lambda1, lambda2, opt).N;
    s.N_parts.push_back(n);
    total += n;
  }
  s.lhs = std::labs(total - s.N_whole);
  s.bound = 2 * (static_cast<long>(pts.size()) + 1);
  s.ok = s.lhs <= s.bound;
  return s;
}

}  // namespace diracgap
