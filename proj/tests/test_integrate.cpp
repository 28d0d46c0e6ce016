#include <cmath>
#include <numbers>
#include <random>

#include "diracgap/integrate.hpp"
#include "diracgap/potentials.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace diracgap;

namespace {

DiracSystem free_sys(double l = 0.0) {
  return DiracSystem(1.0, PeriodicPotential::constant(1.0, 0.0), Coupling::constant(l));
}
DiracSystem two_step(double l = 0.0) {
  return DiracSystem(1.0, PeriodicPotential::piecewise_constant({{0.5, 0.0}, {0.5, 4.0}}),
                     Coupling::constant(l));
}
DiracSystem smooth(double l = 0.0) {
  return DiracSystem(1.0, PeriodicPotential::cosine_series(1.0, {{1, 1.5}, {2, -0.5}}),
                     Coupling::constant(l));
}

void check_close(const Matrix2& x, const Matrix2& y, double tol) {
  CHECK(max_abs_diff(x, y) <= tol);
}

}  // namespace

TEST_CASE("coefficient matrix") {
  auto A = coefficient_matrix(0, 0, 0, 1);
  check_close(A, {0, 1, 1, 0}, 0);
  auto B = coefficient_matrix(2, 0.5, 4, 1);
  check_close(B, {-0.5, -1, 3, 0.5}, 0);
  CHECK(B.trace() == 0.0);
}

TEST_CASE("constant step against scaling and squaring") {
  check_close(constant_step({0, 1, 1, 0}, 1.0), {std::cosh(1.0), std::sinh(1.0), std::sinh(1.0), std::cosh(1.0)},
              1e-14);
  auto E = constant_step({0, 3, -1, 0}, 0.5);
  CHECK(E.a == doctest::Approx(0.6479).epsilon(1e-4));
  CHECK(E.b == doctest::Approx(1.3194).epsilon(1e-4));
  CHECK(E.c == doctest::Approx(-0.4398).epsilon(1e-4));
  check_close(constant_step({0, 0, 0, 0}, 2.0), Matrix2::identity(), 0);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int i = 0; i < 200; ++i) {
    Matrix2 A{u(rng), u(rng), u(rng), 0};
    A.d = -A.a;
    const double h = 0.5 + 0.25 * u(rng);
    auto got = constant_step(A, h);
    auto want = oracle::expm(A, h);
    CHECK(max_abs_diff(got, want) <= 1e-10 * std::max(1.0, want.max_abs()));
    CHECK(got.det() == doctest::Approx(1.0).epsilon(1e-10));
  }
  // parabolic case: det A = 0
  Matrix2 P{1, 1, -1, -1};
  check_close(constant_step(P, 0.7), oracle::expm(P, 0.7), 1e-14);
}

TEST_CASE("one-period transfer matrices") {
  CHECK(transfer_matrix(free_sys(), 2.0, 0, 1).trace() == doctest::Approx(2 * std::cos(std::sqrt(3.0))).epsilon(1e-12));
  auto T = transfer_matrix(two_step(), 2.0, 0, 1);
  CHECK(T.trace() == doctest::Approx(2.773704).epsilon(1e-6));
  CHECK(T.det() == doctest::Approx(1.0).epsilon(1e-12));
  check_close(T, oracle::monodromy({{0.5, 0.0}, {0.5, 4.0}}, 1.0, 2.0, 0.0), 1e-12);
  check_close(transfer_matrix(smooth(), 1.3, 0.4, 0.4), Matrix2::identity(), 0);
}

TEST_CASE("composition and determinant for smooth potentials") {
  for (Method m : {Method::magnus4, Method::rk4}) {
    StepControl c;
    c.method = m;
    c.tol = 1e-11;
    auto T02 = transfer_matrix(smooth(0.7), 1.7, 0.0, 2.3, c);
    auto T01 = transfer_matrix(smooth(0.7), 1.7, 0.0, 0.9, c);
    auto T12 = transfer_matrix(smooth(0.7), 1.7, 0.9, 2.3, c);
    CHECK(max_abs_diff(T02, T12 * T01) <= 1e-9);
    CHECK(T02.det() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("magnus agrees with the exact product on piecewise-constant systems") {
  StepControl c;
  c.method = Method::magnus4;
  c.tol = 1e-12;
  check_close(transfer_matrix(two_step(0.3), -2.5, 0, 3, c), transfer_matrix(two_step(0.3), -2.5, 0, 3), 1e-9);
}

TEST_CASE("fixed-step convergence orders") {
  // Error ratio under halving is about 16 for both fourth-order schemes.
  auto ref = transfer_matrix(smooth(0.4), 2.2, 0, 1, StepControl{1e-13, 16, Method::magnus4, 16});
  for (Method m : {Method::magnus4, Method::rk4}) {
    double e1 = max_abs_diff(transfer_matrix_fixed(smooth(0.4), 2.2, 0, 1, 16, m), ref);
    double e2 = max_abs_diff(transfer_matrix_fixed(smooth(0.4), 2.2, 0, 1, 32, m), ref);
    CHECK(e1 / e2 > 12.0);
    CHECK(e1 / e2 < 20.0);
  }
}

TEST_CASE("Prufer angle") {
  const double pi = std::numbers::pi;
  // theta' = -cos(2 theta) vanishes at pi/4. The fixed point repels at rate
  // 2, so rounding grows like exp(2x); stay on a short interval.
  for (double x1 : {0.5, 1.0, 3.0}) CHECK(std::abs(propagate_prufer(free_sys(), 0.0, pi / 4, 0, x1).theta - pi / 4) < 1e-12);

  auto r = propagate_prufer(free_sys(), 2.0, 0.0, 0, 100);
  CHECK(std::abs(r.theta / 100 - std::sqrt(3.0)) < 0.02);

  // Prufer angle vs the angle of the transfer-matrix image, modulo pi.
  for (const auto& sys : {two_step(0.5), smooth(-0.3)}) {
    for (double th0 : {0.0, 0.4, 2.0}) {
      auto p = propagate_prufer(sys, 1.1, th0, 0.2, 3.7);
      auto T = transfer_matrix(sys, 1.1, 0.2, 3.7);
      Vec2 v = T.apply({std::cos(th0), -std::sin(th0)});
      double d = std::remainder(p.theta - vector_angle(v), pi);
      CHECK(std::abs(d) < 1e-6);
      CHECK(p.log_r == doctest::Approx(std::log(std::hypot(v[0], v[1]))).epsilon(1e-6));
    }
  }
}

TEST_CASE("scalar RK4 Prufer flow agrees with the linear integrators") {
  StepControl c;
  c.method = Method::scalar_rk4;
  c.tol = 1e-10;
  auto a = propagate_prufer(smooth(0.6), 0.8, 0.3, 0, 5, c);
  auto b = propagate_prufer(smooth(0.6), 0.8, 0.3, 0, 5);
  CHECK(a.theta == doctest::Approx(b.theta).epsilon(1e-8));
}

TEST_CASE("sweep matches separate propagations") {
  std::vector<double> th{0.0, 1.0, 2.5};
  auto sw = sweep(two_step(0.2), 3.3, th, 0, 4);
  for (std::size_t i = 0; i < th.size(); ++i)
    CHECK(sw.theta_end[i] == doctest::Approx(propagate_prufer(two_step(0.2), 3.3, th[i], 0, 4).theta).epsilon(1e-9));
  auto traj = prufer_trajectory(two_step(0.2), 3.3, 1.0, 0, 4, 8);
  CHECK(traj.size() == 9);
  CHECK(traj.front() == 1.0);
  CHECK(traj.back() == doctest::Approx(sw.theta_end[1]).epsilon(1e-9));
}
