#include "diracgap/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "diracgap/errors.hpp"

namespace diracgap {

struct PeriodicPotential::Data {
  Kind kind;
  double period = 1.0;
  double sup_norm = 0.0;
  double offset = 0.0;
  std::vector<double> breaks;  // piece starts in [0, period)
  std::vector<double> values;  // segment values or samples
  std::vector<CosineTerm> terms;
};

namespace {

double reduce(double x, double period) {
  double r = x - period * std::floor(x / period);
  return r >= period ? 0.0 : r;
}

}  // namespace

PeriodicPotential PeriodicPotential::piecewise_constant(std::vector<Segment> segments) {
  if (segments.empty()) throw ConfigError("piecewise-constant potential needs at least one segment");
  auto d = std::make_shared<Data>();
  d->kind = Kind::piecewise_constant;
  double x = 0.0;
  for (const auto& s : segments) {
    if (!(s.length > 0.0) || !std::isfinite(s.length))
      throw ConfigError("segment lengths must be positive and finite");
    if (!std::isfinite(s.value)) throw ConfigError("segment values must be finite");
    d->breaks.push_back(x);
    d->values.push_back(s.value);
    d->sup_norm = std::max(d->sup_norm, std::abs(s.value));
    x += s.length;
  }
  d->period = x;
  return PeriodicPotential(std::move(d));
}

PeriodicPotential PeriodicPotential::cosine_series(double period, std::vector<CosineTerm> terms,
                                                   double offset) {
  if (!(period > 0.0) || !std::isfinite(period)) throw ConfigError("period must be positive");
  auto d = std::make_shared<Data>();
  d->kind = Kind::cosine_series;
  d->period = period;
  d->offset = offset;
  d->sup_norm = std::abs(offset);
  for (const auto& t : terms) {
    if (t.frequency < 0) throw ConfigError("cosine frequency index must be non-negative");
    if (!std::isfinite(t.amplitude)) throw ConfigError("cosine amplitude must be finite");
    d->sup_norm += std::abs(t.amplitude);
  }
  d->terms = std::move(terms);
  d->breaks = {0.0};
  return PeriodicPotential(std::move(d));
}

PeriodicPotential PeriodicPotential::samples(double period, std::vector<double> values) {
  if (!(period > 0.0) || !std::isfinite(period)) throw ConfigError("period must be positive");
  if (values.empty()) throw ConfigError("sampled potential needs at least one sample");
  auto d = std::make_shared<Data>();
  d->kind = Kind::samples;
  d->period = period;
  const double h = period / static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw ConfigError("samples must be finite");
    d->breaks.push_back(h * static_cast<double>(i));
    d->sup_norm = std::max(d->sup_norm, std::abs(values[i]));
  }
  d->values = std::move(values);
  return PeriodicPotential(std::move(d));
}

PeriodicPotential PeriodicPotential::constant(double period, double value) {
  return piecewise_constant({{period, value}});
}

PeriodicPotential::Kind PeriodicPotential::kind() const { return d_->kind; }
double PeriodicPotential::period() const { return d_->period; }
double PeriodicPotential::sup_norm() const { return d_->sup_norm; }
std::span<const double> PeriodicPotential::breakpoints() const { return d_->breaks; }
double PeriodicPotential::piece_value(std::size_t i) const { return d_->values.at(i); }

double PeriodicPotential::operator()(double x) const {
  const Data& d = *d_;
  const double xr = reduce(x, d.period);
  switch (d.kind) {
    case Kind::piecewise_constant: {
      auto it = std::upper_bound(d.breaks.begin(), d.breaks.end(), xr);
      return d.values[static_cast<std::size_t>(it - d.breaks.begin()) - 1];
    }
    case Kind::cosine_series: {
      double s = d.offset;
      const double w = 2.0 * std::numbers::pi * xr / d.period;
      for (const auto& t : d.terms) s += t.amplitude * std::cos(w * t.frequency);
      return s;
    }
    case Kind::samples: {
      const std::size_t n = d.values.size();
      const double u = xr / d.period * static_cast<double>(n);
      std::size_t i = std::min(static_cast<std::size_t>(u), n - 1);
      const double f = u - static_cast<double>(i);
      return (1.0 - f) * d.values[i] + f * d.values[(i + 1) % n];
    }
  }
  return 0.0;
}

PeriodicPotential PeriodicPotential::shifted(double s) const {
  auto d = std::make_shared<Data>(*d_);
  if (d->kind == Kind::cosine_series) {
    d->offset += s;
  } else {
    for (double& v : d->values) v += s;
  }
  // recompute the bound from scratch; an override does not survive a shift
  d->sup_norm = std::abs(d->offset);
  if (d->kind == Kind::cosine_series) {
    for (const auto& t : d->terms) d->sup_norm += std::abs(t.amplitude);
  } else {
    d->sup_norm = 0.0;
    for (double v : d->values) d->sup_norm = std::max(d->sup_norm, std::abs(v));
  }
  return PeriodicPotential(std::move(d));
}

PeriodicPotential PeriodicPotential::with_sup_norm(double bound) const {
  if (!(bound >= d_->sup_norm))
    throw ConfigError("sup-norm override is below the computed bound of the potential");
  auto d = std::make_shared<Data>(*d_);
  d->sup_norm = bound;
  return PeriodicPotential(std::move(d));
}

double eval_potential(const PeriodicPotential& p, double x) { return p(x); }

// ---------------------------------------------------------------------------

PerturbationTemplate PerturbationTemplate::inverse_power(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("inverse-power exponent must be > 0");
  PerturbationTemplate t;
  t.kind_ = Kind::inverse_power;
  t.beta_ = beta;
  return t;
}

PerturbationTemplate PerturbationTemplate::tabulated(std::vector<double> rho,
                                                     std::vector<double> values) {
  if (rho.size() < 2 || rho.size() != values.size())
    throw ConfigError("tabulated template needs at least two (rho, l0) nodes");
  if (!(rho.front() > 0.0)) throw ConfigError("tabulated template nodes must have rho > 0");
  for (std::size_t i = 1; i < rho.size(); ++i)
    if (!(rho[i] > rho[i - 1])) throw ConfigError("tabulated template nodes must be increasing");
  for (double v : values)
    if (!std::isfinite(v)) throw ConfigError("tabulated template values must be finite");
  PerturbationTemplate t;
  t.kind_ = Kind::tabulated;
  t.rho_ = std::make_shared<const std::vector<double>>(std::move(rho));
  t.values_ = std::make_shared<const std::vector<double>>(std::move(values));
  return t;
}

double PerturbationTemplate::value(double rho) const {
  if (kind_ == Kind::inverse_power) {
    if (beta_ == 1.0) return 1.0 / rho;
    return std::pow(rho, -beta_);
  }
  const auto& r = *rho_;
  const auto& v = *values_;
  if (rho <= r.front()) return v.front();
  if (rho >= r.back()) return v.back() * r.back() / rho;
  auto it = std::upper_bound(r.begin(), r.end(), rho);
  const std::size_t i = static_cast<std::size_t>(it - r.begin()) - 1;
  const double f = (rho - r[i]) / (r[i + 1] - r[i]);
  return (1.0 - f) * v[i] + f * v[i + 1];
}

double PerturbationTemplate::derivative(double rho) const {
  if (kind_ == Kind::inverse_power) {
    if (beta_ == 1.0) return -1.0 / (rho * rho);
    return -beta_ * std::pow(rho, -beta_ - 1.0);
  }
  const double h = 1e-6 * std::max(rho, rho_->front());
  return (value(rho + h) - value(std::max(rho - h, 0.5 * rho))) /
         (rho + h - std::max(rho - h, 0.5 * rho));
}

std::string PerturbationTemplate::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::inverse_power) {
    os << "inverse_power(beta=" << beta_ << ")";
  } else {
    os << "tabulated(" << rho_->size() << " nodes)";
  }
  return os.str();
}

namespace {

double ratio_sup(const PerturbationTemplate& t, double lo, double hi, int n) {
  double best = 0.0;
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (int i = 0; i < n; ++i) {
    const double rho = (i == n - 1) ? hi : lo * std::exp(step * i);
    const double l = t.value(rho);
    if (l == 0.0 || !std::isfinite(l))
      throw PreconditionError("template vanishes (or is not finite) at rho = " + std::to_string(rho));
    best = std::max(best, std::abs(t.derivative(rho)) / (l * l));
  }
  return best;
}

}  // namespace

HCheckReport validate_template(const PerturbationTemplate& t, double rho_min, double rho_hat,
                               int grid_n) {
  if (!(rho_min > 0.0) || !(rho_hat > rho_min))
    throw PreconditionError("validate_template requires 0 < rho_min < rho_hat");
  if (grid_n < 2) throw PreconditionError("validate_template requires grid_n >= 2");
  HCheckReport rep;
  double lo = rho_min;
  for (int k = 0; k < 3; ++k, lo *= 0.5) rep.refinements.push_back(ratio_sup(t, lo, rho_hat, grid_n));
  rep.C_estimate = rep.refinements.front();
  constexpr double slack = 1e-9;
  rep.passes = rep.refinements[1] <= rep.refinements[0] * (1.0 + slack) &&
               rep.refinements[2] <= rep.refinements[1] * (1.0 + slack);
  return rep;
}

// ---------------------------------------------------------------------------

Coupling Coupling::constant(double l) {
  if (!std::isfinite(l)) throw ConfigError("coupling must be finite");
  Coupling c;
  c.l_ = l;
  return c;
}

Coupling Coupling::scaled(PerturbationTemplate profile, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("profile scale c must be > 0");
  Coupling c;
  c.scale_ = scale;
  c.profile_ = std::move(profile);
  return c;
}

double Coupling::constant_value() const {
  if (profile_) throw PreconditionError("operation requires a constant coupling");
  return l_;
}

const PerturbationTemplate& Coupling::profile() const {
  if (!profile_) throw PreconditionError("coupling has no profile");
  return *profile_;
}

double Coupling::operator()(double r) const {
  return profile_ ? profile_->value(r / scale_) : l_;
}

DiracSystem::DiracSystem(double m, PeriodicPotential q, Coupling l)
    : mass(m), potential(std::move(q)), coupling(std::move(l)) {
  if (!(m > 0.0) || !std::isfinite(m)) throw ConfigError("mass must be positive");
}

DiracSystem DiracSystem::with_coupling(double l) const {
  return DiracSystem(mass, potential, Coupling::constant(l));
}

DiracSystem DiracSystem::with_coupling(Coupling c) const {
  return DiracSystem(mass, potential, std::move(c));
}

}  // namespace diracgap
