// The OpenMP kernels must reproduce the serial reference bit for bit.
#include <cstring>
#include <stdexcept>
#include <vector>

#include "diracgap/asymptotics.hpp"
#include "diracgap/floquet.hpp"
#include "diracgap/parallel.hpp"
#include "doctest.h"

using namespace diracgap;

namespace {

DiracSystem two_step() {
  return DiracSystem(1.0, PeriodicPotential::piecewise_constant({{0.5, 0.0}, {0.5, 4.0}}));
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("parallel_map keeps order and reports the first failure") {
  set_threads(4);
  auto v = parallel_map(100, [](std::size_t i) { return static_cast<double>(i * i); }, Execution::parallel);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == i * i);
  try {
    parallel_map(
        50,
        [](std::size_t i) -> int {
          if (i == 7 || i == 30) throw std::runtime_error(std::to_string(i));
          return 0;
        },
        Execution::parallel);
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "7");
  }
}

TEST_CASE("lambda sweeps") {
  set_threads(4);
  std::vector<double> lams;
  for (int i = 0; i < 97; ++i) lams.push_back(-6 + 0.125 * i);
  auto s = sample_quasimomentum(two_step(), lams, {}, Execution::serial);
  auto p = sample_quasimomentum(two_step(), lams, {}, Execution::parallel);
  for (std::size_t i = 0; i < lams.size(); ++i) {
    CHECK(same_bits(s[i].k, p[i].k));
    CHECK(same_bits(s[i].D, p[i].D));
  }
  auto ds = sample_discriminant(two_step(), lams, {}, Execution::serial);
  auto dp = sample_discriminant(two_step(), lams, {}, Execution::parallel);
  for (std::size_t i = 0; i < lams.size(); ++i) CHECK(same_bits(ds[i], dp[i]));
}

TEST_CASE("quadrature and support scans") {
  set_threads(4);
  auto inv = PerturbationTemplate::inverse_power(1.0);
  SupportOptions so_s, so_p;
  so_s.exec = Execution::serial;
  so_p.exec = Execution::parallel;
  auto bs = support_bounds(two_step(), 4.95, 5.58, inv, 0.05, 30, so_s);
  auto bp = support_bounds(two_step(), 4.95, 5.58, inv, 0.05, 30, so_p);
  CHECK(same_bits(bs.rho_lo, bp.rho_lo));
  CHECK(same_bits(bs.rho_hi, bp.rho_hi));
  QuadratureOptions qs, qp;
  qs.exec = Execution::serial;
  qp.exec = Execution::parallel;
  auto ps = predicted_density(two_step(), 4.95, 5.58, inv, bs, qs);
  auto pp = predicted_density(two_step(), 4.95, 5.58, inv, bs, qp);
  CHECK(same_bits(ps.value, pp.value));
  CHECK(ps.nodes == pp.nodes);
}

TEST_CASE("half-line count sweep") {
  set_threads(4);
  auto inv = PerturbationTemplate::inverse_power(1.0);
  auto plan = plan_truncation(two_step(), inv, 4.95, 5.58, 1.0, 0.035);
  std::vector<double> cs{20, 40};
  ExperimentOptions s, p;
  s.exec = Execution::serial;
  p.exec = Execution::parallel;
  auto rs = convergence_experiment(two_step(), inv, 4.95, 5.58, cs, plan, 0.1156668698, s);
  auto rp = convergence_experiment(two_step(), inv, 4.95, 5.58, cs, plan, 0.1156668698, p);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    CHECK(rs.rows[i].N == rp.rows[i].N);
    CHECK(same_bits(rs.rows[i].ratio, rp.rows[i].ratio));
  }
}
