#pragma once

#include <limits>
#include <vector>

#include "bec/grid.hpp"

namespace bec {

/// Split/recombine schedule. Lengths in u_l, times in 1/Omega.
struct TrapProtocol {
  double a = 2.0;          // quarter of the maximum splitting
  double tau = 70.0;       // operation time
  double theta = 0.0;      // imprinted phase, [0, 2pi)
  double hold_time = 30.0; // evolution in the final harmonic trap

  double imprint_time() const noexcept { return 0.5 * tau; }
  double end_time() const noexcept { return tau + hold_time; }
  void validate() const;  // throws ConfigError
};

/// 3D parameters entering the effective 1D coupling.
struct PhysicalParams {
  double n_atoms = 0.0;
  double scattering_length_ratio = 0.0;  // a_s / u_l
  double trap_ratio = 0.0;               // Omega_perp / Omega
  double transverse_ratio = 0.0;         // a_s / u_perp
  void validate() const;                 // throws ConfigError
};

/// Well separation d(t) = 2a sin^2(pi t / tau) on [0, tau], zero outside.
double separation(double t, const TrapProtocol& protocol);

/// V(x) = (x^2 - d^2)^2 / (2 (x^2 + d^2)); exactly x^2/2 for d == 0.
double double_well(double x, double d);

/// g = 2 N (a_s/u_l)(Omega_perp/Omega) / (1 - 1.4603 a_s/u_perp).
/// Throws ConfigError at or beyond the confinement-induced resonance.
double effective_g(const PhysicalParams& p);

/// Thomas-Fermi chemical potential of the harmonic trap, (3g / (4 sqrt 2))^(2/3).
double thomas_fermi_mu(double g);

/// A potential sampled on a grid. `separation` is NaN for fields that do not
/// come from the double-well family.
struct PotentialField {
  std::vector<double> values;
  double separation = std::numeric_limits<double>::quiet_NaN();
};

PotentialField double_well_field(const Grid& grid, double d);

/// Evaluates V(x, t) for a protocol on a grid, re-using the last field while
/// d(t) moves by less than 1e-12 (the whole hold phase, for instance).
class TrapPotential {
public:
  TrapPotential(GridPtr grid, TrapProtocol protocol);
  std::span<const double> at(double t);
  double current_separation() const noexcept { return cached_d_; }

private:
  GridPtr grid_;
  TrapProtocol protocol_;
  std::vector<double> values_;
  double cached_d_ = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace bec
