#include "diracgap/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "diracgap/errors.hpp"

namespace diracgap {

double Matrix2::max_abs() const {
  return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
}

Matrix2 operator*(const Matrix2& x, const Matrix2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
          x.c * y.b + x.d * y.d};
}

Matrix2 operator+(const Matrix2& x, const Matrix2& y) {
  return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
}

Matrix2 operator*(double s, const Matrix2& x) { return {s * x.a, s * x.b, s * x.c, s * x.d}; }

double max_abs_diff(const Matrix2& x, const Matrix2& y) {
  return std::max({std::abs(x.a - y.a), std::abs(x.b - y.b), std::abs(x.c - y.c),
                   std::abs(x.d - y.d)});
}

Matrix2 coefficient_matrix(double lambda, double l, double q, double m) {
  return {-l, lambda + m - q, m + q - lambda, l};
}

TransferMatrix constant_step(const Matrix2& A, double h) {
  // A traceless => A^2 = -det(A) I, so exp(hA) = C I + S A.
  const double w2 = A.det();
  double C = 1.0, S = h;
  if (w2 > 0.0) {
    const double w = std::sqrt(w2);
    C = std::cos(w * h);
    S = std::sin(w * h) / w;
  } else if (w2 < 0.0) {
    const double w = std::sqrt(-w2);
    C = std::cosh(w * h);
    S = std::sinh(w * h) / w;
  }
  // Use the traceless part only; keeps det = C^2 + S^2 det(A) = 1.
  const double half = 0.5 * (A.a - A.d);
  return {C + S * half, S * A.b, S * A.c, C - S * half};
}

double prufer_rate(double lambda, double l, double q, double m, double theta) {
  return lambda - q - m * std::cos(2.0 * theta) + l * std::sin(2.0 * theta);
}

double vector_angle(const Vec2& v) { return std::atan2(-v[1], v[0]); }

namespace {

constexpr double kMaxTurnPerStep = 1.0;

Method resolve(const DiracSystem& sys, Method m) {
  const bool exact_ok = sys.potential.is_piecewise_constant() && sys.coupling.is_constant();
  if (m == Method::automatic) return exact_ok ? Method::exact : Method::magnus4;
  if (m == Method::exact && !exact_ok)
    throw PreconditionError("exact stepping needs a piecewise-constant potential and constant coupling");
  return m;
}

void check_interval(double x0, double x1) {
  if (!(x1 >= x0) || !std::isfinite(x0) || !std::isfinite(x1))
    throw PreconditionError("integration interval must satisfy x0 <= x1");
}

/// Visits the maximal sub-intervals of [x0, x1] on which q is smooth, in
/// order: piece(start, end, index of the breakpoint opening the piece).
template <class Piece>
void for_each_piece(const PeriodicPotential& q, double x0, double x1, Piece&& piece) {
  const double alpha = q.period();
  const auto B = q.breakpoints();
  const std::size_t nb = B.size();
  double base = alpha * std::floor(x0 / alpha);
  if (x0 - base >= alpha) base += alpha;
  if (x0 < base) base -= alpha;
  std::size_t i =
      static_cast<std::size_t>(std::upper_bound(B.begin(), B.end(), x0 - base) - B.begin()) - 1;
  auto piece_end = [&] { return base + (i + 1 < nb ? B[i + 1] : alpha); };
  auto advance = [&] {
    if (++i == nb) {
      i = 0;
      base += alpha;
    }
  };
  double x = x0;
  while (x < x1) {
    double end = piece_end();
    while (end <= x) {
      advance();
      end = piece_end();
    }
    end = std::min(end, x1);
    piece(x, end, i);
    x = end;
    if (x < x1) advance();
  }
}

struct PieceData {
  double q_bound;   // sup |lambda - q| on the piece
  double l_bound;   // sup |l| on the piece (sampled)
  bool q_constant;
  double q_value;
};

PieceData piece_data(const DiracSystem& sys, double lambda, double s, double e, std::size_t i) {
  PieceData p{};
  p.q_constant = sys.potential.is_piecewise_constant();
  if (p.q_constant) {
    p.q_value = sys.potential.piece_value(i);
    p.q_bound = std::abs(lambda - p.q_value);
  } else {
    p.q_bound = std::abs(lambda) + sys.potential.sup_norm();
  }
  if (sys.coupling.is_constant()) {
    p.l_bound = std::abs(sys.coupling.constant_value());
  } else {
    p.l_bound = std::max({std::abs(sys.coupling(s)), std::abs(sys.coupling(0.5 * (s + e))),
                          std::abs(sys.coupling(e))});
  }
  return p;
}

int substeps(double len, double alpha, int per_period, double turn_rate) {
  const double by_res = std::ceil(len * per_period / alpha - 1e-9);
  const double by_turn = std::ceil(len * turn_rate / kMaxTurnPerStep);
  const double n = std::max({by_res, by_turn, 1.0});
  if (n > 1e9) throw NumericalError("step-size underflow: too many substeps on one piece");
  return static_cast<int>(n);
}

/// Calls visit(S) with the one-step transfer matrix of every step from x0 to
/// x1. With `need_angles` false the exact method takes one step per piece.
template <class Visit>
void walk(const DiracSystem& sys, double lambda, double x0, double x1, int per_period,
          Method method, bool need_angles, Visit&& visit) {
  const double m = sys.mass;
  const double alpha = sys.period();
  const Coupling& cp = sys.coupling;
  for_each_piece(sys.potential, x0, x1, [&](double s, double e, std::size_t i) {
    const double len = e - s;
    if (!(len > 0.0)) return;
    const PieceData pd = piece_data(sys, lambda, s, e, i);
    const double rate = pd.q_bound + std::hypot(m, pd.l_bound);
    auto q_at = [&](double x) { return pd.q_constant ? pd.q_value : sys.potential(x); };

    if (method == Method::exact) {
      const int n = need_angles ? substeps(len, alpha, 1, rate) : 1;
      const Matrix2 A = coefficient_matrix(lambda, cp.constant_value(), pd.q_value, m);
      const Matrix2 S = constant_step(A, len / n);
      for (int k = 0; k < n; ++k) visit(S);
      return;
    }

    const int n = substeps(len, alpha, per_period, rate);
    const double h = len / n;
    for (int k = 0; k < n; ++k) {
      const double xs = s + len * k / n;
      if (method == Method::magnus4) {
        constexpr double g = 0.28867513459481288225;  // sqrt(3)/6
        const double t1 = xs + h * (0.5 - g);
        const double t2 = xs + h * (0.5 + g);
        const Matrix2 A1 = coefficient_matrix(lambda, cp(t1), q_at(t1), m);
        const Matrix2 A2 = coefficient_matrix(lambda, cp(t2), q_at(t2), m);
        const Matrix2 comm = A2 * A1 + (-1.0) * (A1 * A2);
        const Matrix2 Om = (0.5 * h) * (A1 + A2) + (std::sqrt(3.0) / 12.0 * h * h) * comm;
        visit(constant_step(Om, 1.0));
      } else {
        const double xm = xs + 0.5 * h, xe = xs + h;
        const Matrix2 A0 = coefficient_matrix(lambda, cp(xs), q_at(xs), m);
        const Matrix2 Am = coefficient_matrix(lambda, cp(xm), q_at(xm), m);
        const Matrix2 Ae = coefficient_matrix(lambda, cp(xe), q_at(xe), m);
        const Matrix2 I = Matrix2::identity();
        const Matrix2 K1 = A0;
        const Matrix2 K2 = Am * (I + (0.5 * h) * K1);
        const Matrix2 K3 = Am * (I + (0.5 * h) * K2);
        const Matrix2 K4 = Ae * (I + h * K3);
        visit(I + (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4));
      }
    }
  });
}

/// Tracks one real solution through step matrices, lifting its angle.
struct AngleTracker {
  Vec2 v;
  double theta;
  double raw;
  double log_r = 0.0;

  explicit AngleTracker(double theta0)
      : v{std::cos(theta0), -std::sin(theta0)}, theta(theta0), raw(vector_angle(v)) {}

  void step(const Matrix2& S) {
    v = S.apply(v);
    const double r = std::hypot(v[0], v[1]);
    log_r += std::log(r);
    v[0] /= r;
    v[1] /= r;
    const double next = vector_angle(v);
    double d = next - raw;
    if (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
    if (d <= -std::numbers::pi) d += 2.0 * std::numbers::pi;
    theta += d;
    raw = next;
  }
};

PruferState scalar_rk4(const DiracSystem& sys, double lambda, double theta0, double x0, double x1,
                       int per_period) {
  const double m = sys.mass;
  const double alpha = sys.period();
  const Coupling& cp = sys.coupling;
  double th = theta0;
  for_each_piece(sys.potential, x0, x1, [&](double s, double e, std::size_t i) {
    const double len = e - s;
    if (!(len > 0.0)) return;
    const PieceData pd = piece_data(sys, lambda, s, e, i);
    auto f = [&](double x, double t) {
      return prufer_rate(lambda, cp(x), pd.q_constant ? pd.q_value : sys.potential(x), m, t);
    };
    const int n = substeps(len, alpha, per_period, pd.q_bound + std::hypot(m, pd.l_bound));
    const double h = len / n;
    for (int k = 0; k < n; ++k) {
      const double xs = s + len * k / n;
      const double k1 = f(xs, th);
      const double k2 = f(xs + 0.5 * h, th + 0.5 * h * k1);
      const double k3 = f(xs + 0.5 * h, th + 0.5 * h * k2);
      const double k4 = f(xs + h, th + h * k3);
      th += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  });
  return {th, std::numeric_limits<double>::quiet_NaN()};
}

template <class Run, class Diff>
auto calibrated(const StepControl& ctrl, bool single_pass, Run&& run, Diff&& diff) {
  int n = std::max(ctrl.steps_per_period, 1);
  auto coarse = run(n);
  if (single_pass) return coarse;
  for (int k = 0; k < ctrl.max_doublings; ++k) {
    n *= 2;
    auto fine = run(n);
    if (diff(coarse, fine) <= ctrl.tol) return fine;
    coarse = std::move(fine);
  }
  throw NumericalError("step-size underflow: tolerance " + std::to_string(ctrl.tol) +
                       " not reached with " + std::to_string(n) + " steps per period");
}

double matrix_diff(const Matrix2& x, const Matrix2& y) {
  return max_abs_diff(x, y) / std::max(1.0, y.max_abs());
}

}  // namespace

TransferMatrix transfer_matrix_fixed(const DiracSystem& sys, double lambda, double x0, double x1,
                                     int steps_per_period, Method method) {
  check_interval(x0, x1);
  method = resolve(sys, method);
  if (method == Method::scalar_rk4) method = Method::rk4;
  Matrix2 M;
  walk(sys, lambda, x0, x1, steps_per_period, method, false, [&](const Matrix2& S) { M = S * M; });
  return M;
}

TransferMatrix transfer_matrix(const DiracSystem& sys, double lambda, double x0, double x1,
                               const StepControl& ctrl) {
  const Method method = resolve(sys, ctrl.method);
  return calibrated(
      ctrl, method == Method::exact,
      [&](int n) { return transfer_matrix_fixed(sys, lambda, x0, x1, n, method); }, matrix_diff);
}

PruferState propagate_prufer_fixed(const DiracSystem& sys, double lambda, double theta0, double x0,
                                   double x1, int steps_per_period, Method method) {
  check_interval(x0, x1);
  method = resolve(sys, method);
  if (method == Method::scalar_rk4) return scalar_rk4(sys, lambda, theta0, x0, x1, steps_per_period);
  AngleTracker t(theta0);
  walk(sys, lambda, x0, x1, steps_per_period, method, true, [&](const Matrix2& S) { t.step(S); });
  return {t.theta, t.log_r};
}

PruferState propagate_prufer(const DiracSystem& sys, double lambda, double theta0, double x0,
                             double x1, const StepControl& ctrl) {
  const Method method = resolve(sys, ctrl.method);
  return calibrated(
      ctrl, method == Method::exact,
      [&](int n) { return propagate_prufer_fixed(sys, lambda, theta0, x0, x1, n, method); },
      [](const PruferState& a, const PruferState& b) { return std::abs(a.theta - b.theta); });
}

Sweep sweep(const DiracSystem& sys, double lambda, std::span<const double> theta0, double x0,
            double x1, const StepControl& ctrl) {
  check_interval(x0, x1);
  Method method = resolve(sys, ctrl.method);
  if (method == Method::scalar_rk4) method = Method::rk4;
  auto run = [&](int n) {
    Sweep out;
    std::vector<AngleTracker> ts;
    ts.reserve(theta0.size());
    for (double t0 : theta0) ts.emplace_back(t0);
    walk(sys, lambda, x0, x1, n, method, true, [&](const Matrix2& S) {
      out.matrix = S * out.matrix;
      for (auto& t : ts) t.step(S);
    });
    for (const auto& t : ts) out.theta_end.push_back(t.theta);
    return out;
  };
  auto diff = [](const Sweep& a, const Sweep& b) {
    double d = matrix_diff(a.matrix, b.matrix);
    for (std::size_t i = 0; i < a.theta_end.size(); ++i)
      d = std::max(d, std::abs(a.theta_end[i] - b.theta_end[i]));
    return d;
  };
  return calibrated(ctrl, method == Method::exact, run, diff);
}

std::vector<double> prufer_trajectory(const DiracSystem& sys, double lambda, double theta0,
                                      double x0, double x1, int n_samples,
                                      const StepControl& ctrl) {
  check_interval(x0, x1);
  if (n_samples < 1) throw PreconditionError("prufer_trajectory needs n_samples >= 1");
  const Method method = resolve(sys, ctrl.method == Method::scalar_rk4 ? Method::rk4 : ctrl.method);
  auto run = [&](int n) {
    std::vector<double> out{theta0};
    AngleTracker t(theta0);
    for (int k = 0; k < n_samples; ++k) {
      const double a = x0 + (x1 - x0) * k / n_samples;
      const double b = (k + 1 == n_samples) ? x1 : x0 + (x1 - x0) * (k + 1) / n_samples;
      walk(sys, lambda, a, b, n, method, true, [&](const Matrix2& S) { t.step(S); });
      out.push_back(t.theta);
    }
    return out;
  };
  auto diff = [](const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
  };
  return calibrated(ctrl, method == Method::exact, run, diff);
}

}  // namespace diracgap
