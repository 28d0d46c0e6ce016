#include <cmath>
#include <numbers>

#include "diracgap/asymptotics.hpp"
#include "diracgap/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace diracgap;

namespace {

const oracle::Segments kTwoStep{{0.5, 0.0}, {0.5, 4.0}};

DiracSystem free_sys() { return DiracSystem(1.0, PeriodicPotential::constant(1.0, 0.0)); }
DiracSystem two_step() {
  return DiracSystem(1.0, PeriodicPotential::piecewise_constant({{0.5, 0.0}, {0.5, 4.0}}));
}

const auto inv = PerturbationTemplate::inverse_power(1.0);
constexpr double kL1 = 4.95, kL2 = 5.58;

}  // namespace

TEST_CASE("integrand") {
  for (double rho : {0.01, 0.3, 1.0, 20.0}) CHECK(density_integrand(free_sys(), -0.5, 0.5, inv, rho) == 0.0);
  CHECK(density_integrand(two_step(), 3.0, 3.0, inv, 0.4) == 0.0);
  // Positive where a band of the l-coupled system crosses the window.
  for (double rho : {0.26, 0.35, 0.5, 0.6}) {
    double v = density_integrand(two_step(), kL1, kL2, inv, rho);
    CHECK(v > 0.0);
    CHECK(v == doctest::Approx(oracle::k_difference(kTwoStep, 1.0, 1.0 / rho, kL1, kL2, 20000)).epsilon(1e-6));
  }
  // The central gap only widens with l.
  for (double rho : {0.05, 0.2, 0.5, 2.0}) CHECK(density_integrand(two_step(), 1.8, 2.2, inv, rho) == 0.0);
}

TEST_CASE("support bracket") {
  CHECK(support_bounds(free_sys(), -0.5, 0.5, inv, 0.01, 10).empty);
  auto small = PerturbationTemplate::tabulated({1.0, 2.0}, {0.02, 0.01});
  CHECK(support_bounds(two_step(), 5.0, 5.5, small, 0.01, 10).empty);

  auto b = support_bounds(two_step(), kL1, kL2, inv, 0.05, 30);
  REQUIRE_FALSE(b.empty);
  CHECK(b.rho_lo > 0.0);
  CHECK(b.rho_lo < b.rho_hi);
  CHECK(b.rho_lo == doctest::Approx(0.24645).epsilon(1e-4));
  CHECK(b.rho_hi == doctest::Approx(0.64681).epsilon(1e-4));
  CHECK(density_integrand(two_step(), kL1, kL2, inv, b.rho_lo * 0.999) == 0.0);
  CHECK(density_integrand(two_step(), kL1, kL2, inv, b.rho_hi * 1.001) == 0.0);
}

TEST_CASE("adaptive Simpson") {
  std::vector<double> none;
  auto r = adaptive_simpson([](double x) { return std::exp(x); }, 0, 1, none, 4, 1e-12, 40, Execution::serial);
  CHECK(r.value == doctest::Approx(std::exp(1.0) - 1).epsilon(1e-12));
  std::vector<double> kink{0.3};
  auto k = adaptive_simpson([](double x) { return std::abs(x - 0.3); }, 0, 1, kink, 2, 1e-12, 40,
                            Execution::parallel);
  CHECK(k.value == doctest::Approx(0.045 + 0.245).epsilon(1e-12));
}

TEST_CASE("predicted density") {
  auto empty = support_bounds(free_sys(), -0.5, 0.5, inv, 0.01, 10);
  CHECK(predicted_density(free_sys(), -0.5, 0.5, inv, empty).value == 0.0);

  auto b = support_bounds(two_step(), kL1, kL2, inv, 0.05, 30);
  auto p = predicted_density(two_step(), kL1, kL2, inv, b);
  CHECK(p.value == doctest::Approx(0.1156668698).epsilon(1e-8));
  CHECK(p.kinks.size() == 4);

  QuadratureOptions twice;
  twice.panels = 32;
  CHECK(predicted_density(two_step(), kL1, kL2, inv, b, twice).value == doctest::Approx(p.value).epsilon(1e-9));

  // Substituting l = 1/rho: (1/pi) int k_diff(l) / l^2 dl, trapezoid on a fine l grid.
  const int n = 20000;
  const double l_lo = 1.0 / b.rho_hi, l_hi = 1.0 / b.rho_lo;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    double l = l_lo + (l_hi - l_lo) * i / n;
    double f = density_integrand(two_step(), kL1, kL2, inv, 1.0 / l) / (l * l);
    sum += (i == 0 || i == n ? 0.5 : 1.0) * f;
  }
  CHECK(sum * (l_hi - l_lo) / n / std::numbers::pi == doctest::Approx(p.value).epsilon(1e-6));
}

TEST_CASE("convergence experiment") {
  auto plan = plan_truncation(free_sys(), inv, -0.5, 0.5, 1.0, 0.25);
  std::vector<double> cs{25, 50, 100, 200};
  auto rep = convergence_experiment(free_sys(), inv, -0.5, 0.5, cs, plan, 0.0);
  REQUIRE(rep.rows.size() == 4);
  for (const auto& r : rep.rows) {
    CHECK(r.error.empty());
    CHECK(r.N_over_c <= 10.0 / r.c);
    CHECK(std::isnan(r.ratio));
    CHECK(r.budget_over_c == doctest::Approx(6.0 / r.c));
  }
  std::vector<double> one{40};
  CHECK_FALSE(convergence_experiment(free_sys(), inv, -0.5, 0.5, one, plan, 0.0).verdict.has_value());
  std::vector<double> bad{50, 25};
  CHECK_THROWS(convergence_experiment(free_sys(), inv, -0.5, 0.5, bad, plan, 0.0));
}
