// Independent reference computations for the tests. Nothing here calls the
// library's numerics; only its plain data types are shared.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "diracgap/integrate.hpp"

namespace oracle {

using diracgap::Matrix2;

inline Matrix2 mul(const Matrix2& x, const Matrix2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
          x.c * y.b + x.d * y.d};
}

/// exp(hA) by scaling and squaring with a truncated Taylor series.
inline Matrix2 expm(const Matrix2& A, double h) {
  Matrix2 X{A.a * h, A.b * h, A.c * h, A.d * h};
  const double norm = std::max({std::abs(X.a), std::abs(X.b), std::abs(X.c), std::abs(X.d)});
  int s = 0;
  while (norm / std::ldexp(1.0, s) > 0.125) ++s;
  const double f = std::ldexp(1.0, -s);
  X = {X.a * f, X.b * f, X.c * f, X.d * f};
  Matrix2 sum{1, 0, 0, 1}, term{1, 0, 0, 1};
  for (int n = 1; n <= 20; ++n) {
    term = mul(term, X);
    term = {term.a / n, term.b / n, term.c / n, term.d / n};
    sum = {sum.a + term.a, sum.b + term.b, sum.c + term.c, sum.d + term.d};
  }
  for (int i = 0; i < s; ++i) sum = mul(sum, sum);
  return sum;
}

inline Matrix2 coeff(double lambda, double l, double q, double m) {
  return {-l, lambda + m - q, m + q - lambda, l};
}

/// (length, value) pairs of one period of a piecewise-constant potential.
using Segments = std::vector<std::pair<double, double>>;

/// Ordered product of segment exponentials over one period.
inline Matrix2 monodromy(const Segments& segs, double m, double lambda, double l) {
  Matrix2 M{1, 0, 0, 1};
  for (auto [h, q] : segs) M = mul(expm(coeff(lambda, l, q, m), h), M);
  return M;
}

inline double discriminant(const Segments& segs, double m, double lambda, double l) {
  Matrix2 M = monodromy(segs, m, lambda, l);
  return M.a + M.d;
}

/// k(lambda2) - k(lambda1) as the total variation of acos(D/2) on a uniform
/// grid: k rises monotonically through bands (D = 2 cos k) and is flat in gaps.
inline double k_difference(const Segments& segs, double m, double l, double lambda1,
                           double lambda2, int n) {
  double prev = 0.0, total = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double lam = lambda1 + (lambda2 - lambda1) * i / n;
    const double phi = std::acos(std::clamp(discriminant(segs, m, lam, l) / 2.0, -1.0, 1.0));
    if (i > 0) total += std::abs(phi - prev);
    prev = phi;
  }
  return total;
}

/// Quasimomentum of q = 0 with constant l: sign(lambda) sqrt(lambda^2 - m^2 - l^2)
/// on bands, 0 in the gap.
inline double free_k(double lambda, double m, double alpha = 1.0, double l = 0.0) {
  const double s = lambda * lambda - m * m - l * l;
  return s <= 0.0 ? 0.0 : std::copysign(alpha * std::sqrt(s), lambda);
}

/// Density-of-states limit for q = 0: (k(lambda2) - k(lambda1)) / pi.
inline double free_density(double lambda1, double lambda2, double m) {
  return (free_k(lambda2, m) - free_k(lambda1, m)) / std::numbers::pi;
}

/// Eigenvalues in (lambda1, lambda2] of the free operator on [0, L] with
/// u2 = 0 at both ends, found by a dense scan of the shooting residual u2(L)
/// of the closed-form solution.
inline long free_dirichlet_count(double L, double m, double lambda1, double lambda2, int n_scan) {
  auto resid = [&](double lam) {
    Matrix2 T = expm(coeff(lam, 0.0, 0.0, m), L);
    return T.c;  // u(0) = (1, 0) so u2(L) = T.c
  };
  long n = 0;
  double prev = resid(lambda1);
  for (int i = 1; i <= n_scan; ++i) {
    const double lam = lambda1 + (lambda2 - lambda1) * i / n_scan;
    const double r = resid(lam);
    if ((prev < 0) != (r < 0) || r == 0.0) ++n;
    prev = r == 0.0 ? -prev : r;
  }
  return n;
}

}  // namespace oracle
