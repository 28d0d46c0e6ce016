#pragma once

#include <array>
#include <span>
#include <vector>

#include "diracgap/potentials.hpp"

namespace diracgap {

using Vec2 = std::array<double, 2>;

/// Real 2x2 matrix [[a, b], [c, d]].
struct Matrix2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  static Matrix2 identity() { return {}; }
  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }
  Vec2 apply(const Vec2& v) const { return {a * v[0] + b * v[1], c * v[0] + d * v[1]}; }
  double max_abs() const;
};

Matrix2 operator*(const Matrix2& x, const Matrix2& y);
Matrix2 operator+(const Matrix2& x, const Matrix2& y);
Matrix2 operator*(double s, const Matrix2& x);
double max_abs_diff(const Matrix2& x, const Matrix2& y);

/// Fundamental solution matrix between two points: columns are the solutions
/// with initial values e1, e2.
using TransferMatrix = Matrix2;

/// First-order form u' = A u of (-i sigma_2 d/dx + m sigma_3 + q + l sigma_1) u = lambda u:
/// A = [[-l, lambda + m - q], [m + q - lambda, l]]. Always traceless.
Matrix2 coefficient_matrix(double lambda, double l, double q, double m);

/// exp(h A) for traceless A, in closed form.
TransferMatrix constant_step(const Matrix2& A, double h);

/// Right-hand side of the scalar Prufer flow,
/// theta' = lambda - q - m cos 2 theta + l sin 2 theta.
double prufer_rate(double lambda, double l, double q, double m, double theta);

enum class Method {
  automatic,   ///< exact for piecewise-constant q with constant l, otherwise magnus4
  exact,       ///< constant_step products; requires piecewise-constant q and constant l
  magnus4,     ///< fourth-order Magnus exponential integrator
  rk4,         ///< classical Runge-Kutta on the linear system
  scalar_rk4,  ///< classical Runge-Kutta on the scalar Prufer flow (angles only)
};

struct StepControl {
  double tol = 1e-10;
  /// Initial number of steps per period; doubled until two successive
  /// resolutions agree to `tol`.
  int steps_per_period = 16;
  Method method = Method::automatic;
  int max_doublings = 14;
};

/// Prufer variables of a real solution u = R (cos theta, -sin theta).
/// theta is never reduced modulo pi.
struct PruferState {
  double theta = 0.0;
  double log_r = 0.0;
};

/// Transfer matrix from x0 to x1 (x0 <= x1). Throws NumericalError if the
/// step doubling cannot reach tol.
TransferMatrix transfer_matrix(const DiracSystem& sys, double lambda, double x0, double x1,
                               const StepControl& ctrl = {});

/// Single pass at a fixed resolution; no tolerance control.
TransferMatrix transfer_matrix_fixed(const DiracSystem& sys, double lambda, double x0, double x1,
                                     int steps_per_period, Method method);

/// Unwrapped Prufer angle and log amplitude at x1 of the solution whose
/// angle at x0 is theta0 (and amplitude 1).
PruferState propagate_prufer(const DiracSystem& sys, double lambda, double theta0, double x0,
                             double x1, const StepControl& ctrl = {});

PruferState propagate_prufer_fixed(const DiracSystem& sys, double lambda, double theta0, double x0,
                                   double x1, int steps_per_period, Method method);

/// Transfer matrix plus the lifted end angles of several solutions, all from
/// one pass over the same steps.
struct Sweep {
  TransferMatrix matrix;
  std::vector<double> theta_end;
};

Sweep sweep(const DiracSystem& sys, double lambda, std::span<const double> theta0, double x0,
            double x1, const StepControl& ctrl = {});

/// theta sampled at n_samples + 1 equally spaced points of [x0, x1].
std::vector<double> prufer_trajectory(const DiracSystem& sys, double lambda, double theta0,
                                      double x0, double x1, int n_samples,
                                      const StepControl& ctrl = {});

/// Prufer angle of a nonzero vector, in (-pi, pi].
double vector_angle(const Vec2& v);

}  // namespace diracgap
