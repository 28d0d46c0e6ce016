#include <cmath>
#include <numbers>

#include "diracgap/errors.hpp"
#include "diracgap/potentials.hpp"
#include "doctest.h"

using namespace diracgap;

namespace {
PeriodicPotential two_step() { return PeriodicPotential::piecewise_constant({{0.5, 0.0}, {0.5, 4.0}}); }
}  // namespace

TEST_CASE("piecewise constant lookup and periodicity") {
  auto q = two_step();
  CHECK(q.period() == 1.0);
  CHECK(eval_potential(q, 0.25) == 0.0);
  CHECK(eval_potential(q, 1.75) == 4.0);
  CHECK(eval_potential(q, 0.5) == 4.0);
  CHECK(eval_potential(q, -0.25) == 4.0);
  CHECK(q.sup_norm() == 4.0);
  REQUIRE(q.breakpoints().size() == 2);
  CHECK(q.breakpoints()[1] == 0.5);
}

TEST_CASE("periodicity is exact on dyadic points") {
  auto c = PeriodicPotential::cosine_series(2.0, {{1, 0.75}, {3, -0.25}}, 0.5);
  auto s = PeriodicPotential::samples(1.0, {0.0, 1.0, 3.0, 2.0});
  for (int i = 0; i < 64; ++i) {
    const double x = i / 64.0;
    for (int n : {-3, 1, 7}) {
      CHECK(eval_potential(two_step(), x + n) == eval_potential(two_step(), x));
      CHECK(eval_potential(s, x + n) == eval_potential(s, x));
      CHECK(eval_potential(c, x + 2.0 * n) == doctest::Approx(eval_potential(c, x)).epsilon(1e-13));
    }
  }
}

TEST_CASE("cosine series") {
  auto c = PeriodicPotential::cosine_series(2 * std::numbers::pi, {{1, 2.0}});
  CHECK(eval_potential(c, 0.0) == doctest::Approx(2.0));
  CHECK(eval_potential(c, std::numbers::pi) == doctest::Approx(-2.0));
  CHECK(c.sup_norm() == 2.0);
}

TEST_CASE("samples interpolate linearly and wrap") {
  auto s = PeriodicPotential::samples(1.0, {0.0, 1.0, 3.0, 2.0});
  CHECK(eval_potential(s, 0.125) == doctest::Approx(0.5));
  CHECK(eval_potential(s, 0.875) == doctest::Approx(1.0));  // between 2 and the wrapped 0
  CHECK(s.sup_norm() == 3.0);
}

TEST_CASE("shift and sup-norm override") {
  auto q = two_step().shifted(1.5);
  CHECK(eval_potential(q, 0.75) == 5.5);
  CHECK(q.sup_norm() == 5.5);
  CHECK(two_step().with_sup_norm(10.0).sup_norm() == 10.0);
  CHECK_THROWS(two_step().with_sup_norm(3.0));
}

TEST_CASE("templates") {
  auto t = PerturbationTemplate::inverse_power(1.0);
  CHECK(t.value(0.5) == 2.0);
  CHECK(t.derivative(0.5) == -4.0);
  auto t2 = PerturbationTemplate::inverse_power(2.0);
  CHECK(t2.derivative(2.0) == doctest::Approx(-0.25));

  auto tab = PerturbationTemplate::tabulated({1.0, 2.0}, {3.0, 1.0});
  CHECK(tab.value(0.1) == 3.0);
  CHECK(tab.value(1.5) == doctest::Approx(2.0));
  CHECK(tab.value(4.0) == doctest::Approx(0.5));
  CHECK(tab.bounded_at_origin());
  CHECK_FALSE(t.bounded_at_origin());
}

TEST_CASE("hypothesis check") {
  auto r1 = validate_template(PerturbationTemplate::inverse_power(1.0), 1e-4, 1.0, 2001);
  CHECK(r1.passes);
  CHECK(r1.C_estimate == doctest::Approx(1.0).epsilon(1e-12));

  // |l0'|/l0^2 = rho^(-1/2) / 2 blows up at 0.
  auto r05 = validate_template(PerturbationTemplate::inverse_power(0.5), 1e-4, 1.0, 2001);
  CHECK_FALSE(r05.passes);
  CHECK(r05.C_estimate == doctest::Approx(0.5 / std::sqrt(1e-4)).epsilon(1e-9));
  REQUIRE(r05.refinements.size() == 3);
  CHECK(r05.refinements[2] == doctest::Approx(0.5 / std::sqrt(1e-4 / 4)).epsilon(1e-9));

  // Ratio 2 rho: largest at the right end.
  auto r2 = validate_template(PerturbationTemplate::inverse_power(2.0), 1e-4, 1.5, 2001);
  CHECK(r2.passes);
  CHECK(r2.C_estimate == doctest::Approx(3.0).epsilon(1e-9));

  CHECK_THROWS_AS(validate_template(PerturbationTemplate::tabulated({1.0, 2.0}, {0.0, 0.0}), 0.5, 1.0, 11),
                  PreconditionError);
}

TEST_CASE("coupling and system") {
  auto c = Coupling::scaled(PerturbationTemplate::inverse_power(1.0), 10.0);
  CHECK(c(5.0) == doctest::Approx(2.0));
  CHECK_FALSE(c.is_constant());
  CHECK_THROWS(c.constant_value());
  CHECK(Coupling::constant(0.3).constant_value() == 0.3);
  CHECK_THROWS(DiracSystem(0.0, two_step()));
  DiracSystem s(1.0, two_step());
  CHECK(s.with_coupling(0.5).coupling.constant_value() == 0.5);
}
