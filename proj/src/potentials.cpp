#include "bec/potentials.hpp"

#include <cmath>
#include <numbers>

#include "bec/errors.hpp"
#include "bec/kernels.hpp"

namespace bec {

void TrapProtocol::validate() const {
  if (!(a >= 0.0)) throw ConfigError("protocol: a must be >= 0");
  if (!(tau > 0.0)) throw ConfigError("protocol: tau must be > 0");
  if (!(hold_time >= 0.0)) throw ConfigError("protocol: hold_time must be >= 0");
  if (!(theta >= 0.0 && theta < 2.0 * std::numbers::pi))
    throw ConfigError("protocol: theta must lie in [0, 2pi)");
}

void PhysicalParams::validate() const {
  if (!(n_atoms > 0.0)) throw ConfigError("physical params: n_atoms must be > 0");
  if (!(scattering_length_ratio >= 0.0))
    throw ConfigError("physical params: scattering_length_ratio must be >= 0");
  if (!(trap_ratio > 0.0)) throw ConfigError("physical params: trap_ratio must be > 0");
  if (!(transverse_ratio >= 0.0))
    throw ConfigError("physical params: transverse_ratio must be >= 0");
  if (!(1.4603 * transverse_ratio < 1.0))
    throw ConfigError("physical params: 1.4603 * a_s/u_perp >= 1 (confinement-induced resonance)");
}

double separation(double t, const TrapProtocol& protocol) {
  if (t <= 0.0 || t >= protocol.tau) return 0.0;
  const double s = std::sin(std::numbers::pi * t / protocol.tau);
  return 2.0 * protocol.a * s * s;
}

double double_well(double x, double d) {
  if (d == 0.0) return 0.5 * x * x;
  const double x2 = x * x;
  const double d2 = d * d;
  return 0.5 * (x2 - d2) * (x2 - d2) / (x2 + d2);
}

double effective_g(const PhysicalParams& p) {
  p.validate();
  return 2.0 * p.n_atoms * p.scattering_length_ratio * p.trap_ratio /
         (1.0 - 1.4603 * p.transverse_ratio);
}

double thomas_fermi_mu(double g) {
  if (g <= 0.0) return 0.0;
  return std::cbrt(std::pow(3.0 * g / (4.0 * std::numbers::sqrt2), 2.0));
}

PotentialField double_well_field(const Grid& grid, double d) {
  PotentialField f;
  f.values.resize(grid.size());
  f.separation = d;
  kernels::double_well(kernels::Backend::parallel, f.values, grid.x(), d);
  return f;
}

TrapPotential::TrapPotential(GridPtr grid, TrapProtocol protocol)
    : grid_(std::move(grid)), protocol_(protocol), values_(grid_->size()) {}

std::span<const double> TrapPotential::at(double t) {
  const double d = separation(t, protocol_);
  if (!(std::abs(d - cached_d_) < 1e-12)) {
    kernels::double_well(kernels::Backend::parallel, values_, grid_->x(), d);
    cached_d_ = d;
  }
  return values_;
}

}  // namespace bec
