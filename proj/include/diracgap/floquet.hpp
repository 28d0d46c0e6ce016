#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diracgap/integrate.hpp"
#include "diracgap/parallel.hpp"
#include "diracgap/potentials.hpp"

namespace diracgap {

// All functions here require a constant coupling (sys.coupling.is_constant()).

TransferMatrix monodromy(const DiracSystem& sys, double lambda, const StepControl& ctrl = {});

/// Trace of the monodromy matrix.
double discriminant(const DiracSystem& sys, double lambda, const StepControl& ctrl = {});

struct QuasimomentumDetail {
  double k = 0.0;
  double D = 0.0;
  TransferMatrix monodromy;
  bool in_band = false;  ///< |D| < 2
};

/// Quasimomentum k(lambda): alpha times the rotation number.
///
/// The value is the translation number of the lifted one-period Prufer map.
/// D fixes it modulo 2 pi up to sign (D = 2 cos k), the rotation sense of the
/// elliptic monodromy fixes the sign, and the lifted increments of four
/// solutions over one period pick the branch (they lie within pi of k).
double quasimomentum(const DiracSystem& sys, double lambda, const StepControl& ctrl = {});
QuasimomentumDetail quasimomentum_detail(const DiracSystem& sys, double lambda,
                                         const StepControl& ctrl = {});

/// (theta(n alpha) - theta(0)) / n for the solution with theta(0) = 0.
double rotation_number(const DiracSystem& sys, double lambda, int n_periods,
                       const StepControl& ctrl = {});

struct BandEdge {
  double lambda;
  int type;  ///< +2 or -2: which of D = +-2 holds at the edge
};

struct SpectralInterval {
  double left;
  double right;
  int index;  ///< n with k in [n pi, (n+1) pi] on bands, k = n pi on gaps
};

struct BandStructure {
  double coupling = 0.0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  std::vector<BandEdge> edges;
  std::vector<SpectralInterval> bands;
  std::vector<SpectralInterval> gaps;
  std::vector<std::string> warnings;

  /// Gap (of the computed window) whose closure contains [lo, hi], if any.
  std::optional<SpectralInterval> gap_containing(double lo, double hi) const;
};

struct BandScanOptions {
  double points_per_unit = 512.0;
  double edge_tol = 1e-10;
  /// |D| within this distance of 2 at a local extremum triggers refinement.
  double degeneracy_probe = 1e-3;
  StepControl ctrl{};
  Execution exec = Execution::parallel;
};

/// Band edges (roots of D -+ 2) in [lo, hi], bracketed on a uniform grid and
/// bisected. Near-touching extrema of |D| are reported as warnings.
BandStructure band_edges(const DiracSystem& sys, double lo, double hi,
                         const BandScanOptions& opt = {});

struct FloquetData {
  TransferMatrix monodromy;
  double D = 0.0;
  std::complex<double> mu1, mu2;
  std::optional<double> k;  ///< set when |D| < 2; then mu1 = exp(i k)
  std::array<std::complex<double>, 2> initial;  ///< u(0) of the Floquet solution for mu1
  double residual = 0.0;  ///< max_{j<=5} |u(j alpha) - mu1^j u(0)| / |mu1^j u(0)|
};

/// Floquet multipliers and the Floquet solution for mu1. Refuses
/// |D| within degeneracy_tol of 2 (possibly defective monodromy).
FloquetData floquet_solution(const DiracSystem& sys, double lambda, const StepControl& ctrl = {},
                             double degeneracy_tol = 1e-9);

/// Data-parallel evaluations over a lambda grid.
std::vector<double> sample_discriminant(const DiracSystem& sys, std::span<const double> lambdas,
                                        const StepControl& ctrl, Execution exec);
std::vector<QuasimomentumDetail> sample_quasimomentum(const DiracSystem& sys,
                                                      std::span<const double> lambdas,
                                                      const StepControl& ctrl, Execution exec);

}  // namespace diracgap
