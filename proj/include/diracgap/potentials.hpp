#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace diracgap {

struct Segment {
  double length;
  double value;
};

/// One term a * cos(2 pi j x / period) of a cosine series.
struct CosineTerm {
  int frequency;
  double amplitude;
};

/// Real, bounded, periodic scalar coefficient q of the Dirac system.
///
/// Piecewise-constant potentials admit exact propagation; cosine series and
/// linearly interpolated samples go through the Magnus integrator.
/// Instances are immutable and cheap to copy.
class PeriodicPotential {
 public:
  enum class Kind { piecewise_constant, cosine_series, samples };

  static PeriodicPotential piecewise_constant(std::vector<Segment> segments);
  static PeriodicPotential cosine_series(double period, std::vector<CosineTerm> terms,
                                         double offset = 0.0);
  static PeriodicPotential samples(double period, std::vector<double> values);
  /// q identically equal to `value`, as a single segment of length `period`.
  static PeriodicPotential constant(double period, double value);

  Kind kind() const;
  double period() const;
  /// Upper bound for |q| (exact for segments and samples, sum of |amplitudes|
  /// for cosine series, or the override given by with_sup_norm).
  double sup_norm() const;

  /// q(x mod period).
  double operator()(double x) const;

  /// Sorted points in [0, period) where q may be non-smooth. Always starts
  /// with 0. For piecewise-constant potentials these are the segment starts.
  std::span<const double> breakpoints() const;
  /// Value on piece i (piecewise-constant only).
  double piece_value(std::size_t i) const;

  /// q + s; the same representation with every value shifted.
  PeriodicPotential shifted(double s) const;
  /// Same potential with a user-supplied sup-norm bound; must not be below
  /// the computed bound.
  PeriodicPotential with_sup_norm(double bound) const;

  bool is_piecewise_constant() const { return kind() == Kind::piecewise_constant; }

 private:
  struct Data;
  explicit PeriodicPotential(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;
};

/// q(x mod period).
double eval_potential(const PeriodicPotential& p, double x);

/// Decaying coupling profile l0 on (0, inf).
///
/// `inverse_power`: l0(rho) = rho^-beta.
/// `tabulated`: linear interpolation through (rho_i, l_i) with rho_0 > 0,
/// held constant below rho_0 and continued as l_last * rho_last / rho beyond
/// the last node. Derivatives of tabulated profiles use a symmetric difference.
class PerturbationTemplate {
 public:
  enum class Kind { inverse_power, tabulated };

  static PerturbationTemplate inverse_power(double beta);
  static PerturbationTemplate tabulated(std::vector<double> rho, std::vector<double> values);

  Kind kind() const { return kind_; }
  double beta() const { return beta_; }
  /// True when l0 stays bounded as rho -> 0.
  bool bounded_at_origin() const { return kind_ == Kind::tabulated; }

  double value(double rho) const;
  double derivative(double rho) const;
  double operator()(double rho) const { return value(rho); }

  std::string describe() const;

 private:
  PerturbationTemplate() = default;
  Kind kind_ = Kind::inverse_power;
  double beta_ = 1.0;
  std::shared_ptr<const std::vector<double>> rho_;
  std::shared_ptr<const std::vector<double>> values_;
};

struct HCheckReport {
  bool passes = false;
  double C_estimate = 0.0;
  /// Estimates on (rho_min, rho_hat), (rho_min/2, rho_hat), (rho_min/4, rho_hat).
  std::vector<double> refinements;
};

/// Estimates sup |l0'| / l0^2 over [rho_min, rho_hat] on a log-spaced grid of
/// grid_n points, then repeats the estimate with rho_min halved twice. The
/// check passes when the estimate does not increase under the halvings.
/// Throws PreconditionError if l0 vanishes on the grid.
HCheckReport validate_template(const PerturbationTemplate& t, double rho_min,
                               double rho_hat, int grid_n);

/// sigma_1 coefficient: either a constant l, or the scaled profile
/// r -> l0(r / c).
class Coupling {
 public:
  static Coupling constant(double l);
  static Coupling scaled(PerturbationTemplate profile, double scale);

  bool is_constant() const { return !profile_.has_value(); }
  double constant_value() const;
  double scale() const { return scale_; }
  const PerturbationTemplate& profile() const;

  double operator()(double r) const;

 private:
  double l_ = 0.0;
  double scale_ = 1.0;
  std::optional<PerturbationTemplate> profile_;
};

/// -i sigma_2 d/dx + m sigma_3 + q(x) + l(x) sigma_1.
struct DiracSystem {
  double mass = 1.0;
  PeriodicPotential potential;
  Coupling coupling = Coupling::constant(0.0);

  DiracSystem(double m, PeriodicPotential q, Coupling l = Coupling::constant(0.0));

  double period() const { return potential.period(); }
  DiracSystem with_coupling(double l) const;
  DiracSystem with_coupling(Coupling c) const;
};

}  // namespace diracgap
