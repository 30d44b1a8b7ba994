#pragma once

#include <filesystem>
#include <optional>
#include <span>

#include "bec/grid.hpp"
#include "bec/potentials.hpp"

namespace bec {

enum class Parity { even, odd };
const char* to_string(Parity p);

/// Nonlinear eigenstate of -1/2 d^2/dx^2 + V + g|phi|^2 with eigenvalue mu.
/// The wavefunction is real, unit-normalized and positive at its rightmost
/// density peak.
struct StationaryState {
  WaveFunction wavefunction;
  double chemical_potential = 0.0;
  Parity parity = Parity::even;
  double separation = 0.0;
  double coupling = 0.0;
  double residual = 0.0;       // ||(H - mu) phi|| in the grid norm
  double mu_norm_decay = 0.0;  // imaginary-time norm decay rate, extrapolated to dt -> 0
};

struct StationaryOptions {
  double tol = 1e-8;  // residual tolerance
  double dt = 1e-3;   // imaginary-time step
  std::size_t max_relax_steps = 200000;
  int max_newton = 40;
};

/// Lowest even state: imaginary-time relaxation from the g = 0 seed followed
/// by a Newton polish until the residual drops below tol. Throws
/// NumericalError on non-convergence or a parity violation.
StationaryState ground_state(GridPtr grid, const PotentialField& v, double g,
                             const StationaryOptions& opts = {});

/// Lowest odd state; the relaxation is antisymmetrized after every step.
StationaryState first_excited(GridPtr grid, const PotentialField& v, double g,
                              const StationaryOptions& opts = {});

StationaryState solve_stationary(GridPtr grid, const PotentialField& v, double g, Parity parity,
                                 const StationaryOptions& opts = {},
                                 const WaveFunction* seed = nullptr);

/// Ideal-gas seed: Gaussians at +-d (even) or x times that (odd); at d = 0
/// these are the two lowest harmonic-oscillator states.
WaveFunction parity_seed(GridPtr grid, double d, Parity parity);

/// <phi| -1/2 d^2/dx^2 + V + g|phi|^2 |phi> for a normalized phi.
double expectation_mu(const WaveFunction& phi, std::span<const double> v, double g);
/// ||(-1/2 d^2/dx^2 + V + g|phi|^2 - mu) phi|| in the grid norm.
double stationary_residual(const WaveFunction& phi, std::span<const double> v, double g,
                           double mu);

/// max_x |phi(x) -+ phi(-x)|
double parity_defect(const WaveFunction& phi, Parity parity);

/// Directory of binary field dumps keyed by (g, d, parity, n_points,
/// half_width). Loaded states are re-verified against the tolerance.
class StateCache {
public:
  explicit StateCache(std::filesystem::path dir);
  std::filesystem::path key_path(const Grid& grid, double g, double d, Parity parity) const;
  std::optional<StationaryState> load(GridPtr grid, double g, double d, Parity parity,
                                      const StationaryOptions& opts) const;
  void store(const StationaryState& s) const;

private:
  std::filesystem::path dir_;
};

/// Cache-aware solve at a double-well separation. `cache` may be null.
StationaryState stationary_at(GridPtr grid, double d, double g, Parity parity,
                              const StationaryOptions& opts = {},
                              const StateCache* cache = nullptr);

}  // namespace bec
