#include "diracgap/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "diracgap/errors.hpp"

namespace diracgap {

namespace {

constexpr double kPi = std::numbers::pi;

void require_constant(const DiracSystem& sys) {
  if (!sys.coupling.is_constant())
    throw PreconditionError("band analysis requires a constant coupling");
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

TransferMatrix monodromy(const DiracSystem& sys, double lambda, const StepControl& ctrl) {
  require_constant(sys);
  return transfer_matrix(sys, lambda, 0.0, sys.period(), ctrl);
}

double discriminant(const DiracSystem& sys, double lambda, const StepControl& ctrl) {
  return monodromy(sys, lambda, ctrl).trace();
}

QuasimomentumDetail quasimomentum_detail(const DiracSystem& sys, double lambda,
                                         const StepControl& ctrl) {
  require_constant(sys);
  static constexpr std::array<double, 4> starts{0.0, 0.25 * kPi, 0.5 * kPi, 0.75 * kPi};
  const Sweep s = sweep(sys, lambda, starts, 0.0, sys.period(), ctrl);
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const double inc = s.theta_end[i] - starts[i];
    lo = std::min(lo, inc);
    hi = std::max(hi, inc);
  }
  const double mid = 0.5 * (lo + hi);

  QuasimomentumDetail out;
  out.monodromy = s.matrix;
  out.D = s.matrix.trace();
  out.in_band = std::abs(out.D) < 2.0;
  double base;
  if (out.D >= 2.0) {
    base = 0.0;
  } else if (out.D <= -2.0) {
    base = kPi;
  } else {
    // Prufer angles turn clockwise in the (u1, u2) plane: a negative lower-left
    // entry means the monodromy advances theta by +arccos(D/2).
    const double a = std::acos(0.5 * out.D);
    const double orient = s.matrix.c != 0.0 ? s.matrix.c : -s.matrix.b;
    base = orient < 0.0 ? a : -a;
  }
  out.k = base + 2.0 * kPi * std::round((mid - base) / (2.0 * kPi));
  return out;
}

double quasimomentum(const DiracSystem& sys, double lambda, const StepControl& ctrl) {
  return quasimomentum_detail(sys, lambda, ctrl).k;
}

double rotation_number(const DiracSystem& sys, double lambda, int n_periods,
                       const StepControl& ctrl) {
  require_constant(sys);
  if (n_periods < 1) throw PreconditionError("rotation_number requires n_periods >= 1");
  const PruferState st = propagate_prufer(sys, lambda, 0.0, 0.0, n_periods * sys.period(), ctrl);
  return st.theta / n_periods;
}

std::vector<double> sample_discriminant(const DiracSystem& sys, std::span<const double> lambdas,
                                        const StepControl& ctrl, Execution exec) {
  return parallel_map(
      lambdas.size(), [&](std::size_t i) { return discriminant(sys, lambdas[i], ctrl); }, exec);
}

std::vector<QuasimomentumDetail> sample_quasimomentum(const DiracSystem& sys,
                                                      std::span<const double> lambdas,
                                                      const StepControl& ctrl, Execution exec) {
  return parallel_map(
      lambdas.size(), [&](std::size_t i) { return quasimomentum_detail(sys, lambdas[i], ctrl); },
      exec);
}

std::optional<SpectralInterval> BandStructure::gap_containing(double lo, double hi) const {
  for (const auto& g : gaps)
    if (g.left <= lo && hi <= g.right) return g;
  return std::nullopt;
}

namespace {

double bisect_root(const DiracSystem& sys, double target, double a, double b, double tol,
                   const StepControl& ctrl) {
  double fa = discriminant(sys, a, ctrl) - target;
  while (b - a > tol) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const double fm = discriminant(sys, m, ctrl) - target;
    if (fm == 0.0) return m;
    if (sign_of(fm) == sign_of(fa)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

/// Golden-section search for the extremum of |D| on [a, b]; returns the
/// extreme |D| value. `want_max` selects maximum or minimum.
double extreme_abs_d(const DiracSystem& sys, double a, double b, bool want_max,
                     const StepControl& ctrl) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  auto f = [&](double x) {
    const double v = std::abs(discriminant(sys, x, ctrl));
    return want_max ? -v : v;
  };
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  const double v = std::min(f1, f2);
  return want_max ? -v : v;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

BandStructure band_edges(const DiracSystem& sys, double lo, double hi,
                         const BandScanOptions& opt) {
  require_constant(sys);
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi >= lo))
    throw PreconditionError("band_edges requires a finite window lo <= hi");
  BandStructure bs;
  bs.coupling = sys.coupling.constant_value();
  bs.lambda_lo = lo;
  bs.lambda_hi = hi;

  const std::size_t n =
      std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil((hi - lo) * opt.points_per_unit)) + 1);
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i)
    grid[i] = (i + 1 == n) ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  if (hi == lo) grid.assign(1, lo);
  const std::vector<double> D = sample_discriminant(sys, grid, opt.ctrl, opt.exec);

  for (int target : {2, -2}) {
    std::vector<int> s(D.size());
    for (std::size_t i = 0; i < D.size(); ++i) s[i] = sign_of(D[i] - target);
    for (std::size_t i = 0; i + 1 < D.size(); ++i) {
      if (s[i] * s[i + 1] < 0) {
        bs.edges.push_back({bisect_root(sys, target, grid[i], grid[i + 1], opt.edge_tol, opt.ctrl), target});
      } else if (s[i] == 0) {
        // exact hit on a grid point: an edge only if the sign really changes
        int left = 0, right = 0;
        for (std::size_t j = i; j-- > 0;)
          if (s[j] != 0) { left = s[j]; break; }
        for (std::size_t j = i + 1; j < s.size(); ++j)
          if (s[j] != 0) { right = s[j]; break; }
        if (left != 0 && right != 0 && left != right) {
          bs.edges.push_back({grid[i], target});
        } else if (left == right && left != 0) {
          bs.warnings.push_back("degenerate edge: D touches " + std::to_string(target) +
                                " without crossing at lambda = " + fmt(grid[i]));
        }
      }
    }
  }
  std::sort(bs.edges.begin(), bs.edges.end(),
            [](const BandEdge& a, const BandEdge& b) { return a.lambda < b.lambda; });

  // Degenerate or unresolved edges: interior extrema of |D| close to 2.
  for (std::size_t i = 1; i + 1 < D.size(); ++i) {
    const double v = std::abs(D[i]);
    const double l = std::abs(D[i - 1]), r = std::abs(D[i + 1]);
    if (v < 2.0 && v >= l && v >= r && 2.0 - v < opt.degeneracy_probe) {
      const double peak = extreme_abs_d(sys, grid[i - 1], grid[i + 1], true, opt.ctrl);
      if (peak >= 2.0 - 1e-7)
        bs.warnings.push_back("possible closed gap (|D| reaches " + fmt(peak) + ") near lambda = " +
                              fmt(grid[i]));
    } else if (v > 2.0 && v <= l && v <= r && v - 2.0 < opt.degeneracy_probe) {
      const double dip = extreme_abs_d(sys, grid[i - 1], grid[i + 1], false, opt.ctrl);
      if (dip <= 2.0 + 1e-7)
        bs.warnings.push_back("unresolved edge pair (|D| dips to " + fmt(dip) + ") near lambda = " +
                              fmt(grid[i]));
    }
  }

  std::vector<double> cuts{lo};
  for (const auto& e : bs.edges) cuts.push_back(e.lambda);
  cuts.push_back(hi);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (!(b > a)) continue;
    const QuasimomentumDetail q = quasimomentum_detail(sys, 0.5 * (a + b), opt.ctrl);
    if (q.in_band) {
      bs.bands.push_back({a, b, static_cast<int>(std::floor(q.k / kPi))});
    } else {
      bs.gaps.push_back({a, b, static_cast<int>(std::lround(q.k / kPi))});
    }
  }
  if (hi == lo) {
    const QuasimomentumDetail q = quasimomentum_detail(sys, lo, opt.ctrl);
    if (q.in_band)
      bs.bands.push_back({lo, hi, static_cast<int>(std::floor(q.k / kPi))});
    else
      bs.gaps.push_back({lo, hi, static_cast<int>(std::lround(q.k / kPi))});
  }
  return bs;
}

FloquetData floquet_solution(const DiracSystem& sys, double lambda, const StepControl& ctrl,
                             double degeneracy_tol) {
  require_constant(sys);
  const QuasimomentumDetail q = quasimomentum_detail(sys, lambda, ctrl);
  FloquetData f;
  f.monodromy = q.monodromy;
  f.D = q.D;
  if (std::abs(std::abs(f.D) - 2.0) <= degeneracy_tol)
    throw NumericalError("floquet_solution: |D| = 2 within tolerance, multipliers not simple");
  const Matrix2& M = f.monodromy;
  using cd = std::complex<double>;
  if (q.in_band) {
    f.k = q.k;
    f.mu1 = std::exp(cd(0.0, q.k));
    f.mu2 = std::conj(f.mu1);
  } else {
    const double disc = std::sqrt(f.D * f.D - 4.0);
    // larger-magnitude root first, smaller one via the product to avoid cancellation
    const double big = 0.5 * (f.D + (f.D > 0 ? disc : -disc));
    f.mu1 = big;
    f.mu2 = 1.0 / big;
  }
  // eigenvector of M for mu1: rows give (b, mu - a) or (mu - d, c)
  std::array<cd, 2> v1{cd(M.b), f.mu1 - M.a};
  std::array<cd, 2> v2{f.mu1 - M.d, cd(M.c)};
  auto nrm = [](const std::array<cd, 2>& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1])); };
  std::array<cd, 2> v = nrm(v1) >= nrm(v2) ? v1 : v2;
  const double nv = nrm(v);
  v[0] /= nv;
  v[1] /= nv;
  f.initial = v;

  double res = 0.0;
  cd mu_j = 1.0;
  for (int j = 1; j <= 5; ++j) {
    mu_j *= f.mu1;
    const TransferMatrix T = transfer_matrix(sys, lambda, 0.0, j * sys.period(), ctrl);
    const cd u0 = T.a * v[0] + T.b * v[1];
    const cd u1 = T.c * v[0] + T.d * v[1];
    const double scale = std::abs(mu_j);
    res = std::max(res, std::sqrt(std::norm(u0 - mu_j * v[0]) + std::norm(u1 - mu_j * v[1])) / scale);
  }
  f.residual = res;
  return f;
}

}  // namespace diracgap
