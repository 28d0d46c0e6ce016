// Serial reference vs OpenMP for the three sweep kernels.
// usage: bench_kernels [threads] [repeats]
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "diracgap/asymptotics.hpp"
#include "diracgap/floquet.hpp"
#include "diracgap/parallel.hpp"

using namespace diracgap;

namespace {

double best_of(int repeats, const std::function<double()>& f, double& checksum) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    checksum = f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, int repeats, const std::function<double(Execution)>& kernel) {
  double cs = 0, cp = 0;
  double ts = best_of(repeats, [&] { return kernel(Execution::serial); }, cs);
  double tp = best_of(repeats, [&] { return kernel(Execution::parallel); }, cp);
  std::printf("%-22s serial %9.4f s  parallel %9.4f s  speedup %5.2fx  %s\n", name, ts, tp, ts / tp,
              cs == cp ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) set_threads(std::atoi(argv[1]));
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
  std::printf("threads %d\n", max_threads());

  const DiracSystem two(1.0, PeriodicPotential::piecewise_constant({{0.5, 0.0}, {0.5, 4.0}}));
  const DiracSystem smooth(1.0, PeriodicPotential::cosine_series(1.0, {{1, 2.0}, {3, -0.5}}));
  const auto inv = PerturbationTemplate::inverse_power(1.0);

  std::vector<double> lams(4000);
  for (std::size_t i = 0; i < lams.size(); ++i) lams[i] = -6 + 12.0 * i / (lams.size() - 1);

  report("lambda grid (exact)", repeats, [&](Execution e) {
    double s = 0;
    for (const auto& r : sample_quasimomentum(two, lams, {}, e)) s += r.k;
    return s;
  });
  std::vector<double> coarse(lams.begin(), lams.begin() + 400);
  report("lambda grid (magnus)", repeats, [&](Execution e) {
    double s = 0;
    for (const auto& r : sample_quasimomentum(smooth, coarse, {}, e)) s += r.k;
    return s;
  });

  const auto plan = plan_truncation(two, inv, 4.95, 5.58, 1.0, 0.035);
  SupportOptions so;
  so.exec = Execution::serial;
  const auto support = support_bounds(two, 4.95, 5.58, inv, plan.rho0, plan.P0, so);
  report("quadrature panels", repeats, [&](Execution e) {
    QuadratureOptions q;
    q.exec = e;
    return predicted_density(two, 4.95, 5.58, inv, support, q).value;
  });

  std::vector<double> cs{25, 50, 100, 200};
  report("c sweep", repeats, [&](Execution e) {
    ExperimentOptions o;
    o.exec = e;
    double s = 0;
    for (const auto& r : convergence_experiment(two, inv, 4.95, 5.58, cs, plan, 0.1156668698, o).rows) s += r.N;
    return s;
  });
}
