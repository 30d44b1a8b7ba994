#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "bec/grid.hpp"
#include "bec/potentials.hpp"
#include "bec/stationary.hpp"

namespace bec {

/// Bogoliubov mode (u, v) with frequency omega on the finite-difference
/// window of a BdgSpectrum.
struct BdgMode {
  cplx frequency;
  std::vector<cplx> u;
  std::vector<cplx> v;
  int norm_sign = 0;  // sign of int |u|^2 - |v|^2; 0 when it vanishes
  Parity parity = Parity::even;  // parity of u
  bool goldstone = false;
  double residual = 0.0;  // ||(L - omega) w|| / ||w||
};

struct BdgOptions {
  double window = 10.0;  // the operator lives on |x| < window, Dirichlet outside
  std::size_t stride = 1;  // take every stride-th point of the simulation grid
  std::size_t n_modes = 8;  // modes kept besides the Goldstone mode
  bool check_refinement = true;
};

struct BdgSpectrum {
  std::vector<double> x;     // window points
  double dx = 0.0;
  double mu = 0.0;
  std::vector<double> phi;   // condensate re-converged on the window
  double phi_residual = 0.0;
  /// Goldstone mode first (when found), then modes ordered by |omega|.
  std::vector<BdgMode> modes;
  /// max over representatives of the distance between -conj(omega) and its partner
  double max_pair_defect = 0.0;
  /// Relative change of the lowest nonzero |omega| against the twice coarser
  /// window grid, and whether it exceeds 1%.
  std::optional<double> refinement_change;
  bool discretization_sensitive = false;

  const BdgMode* goldstone() const;
  /// First non-Goldstone mode (lowest |omega|).
  const BdgMode* lowest() const;
  double max_growth_rate() const;  // max Im omega over the kept modes
  /// Embeds a window field into a full simulation grid (zero outside).
  std::vector<cplx> embed(const std::vector<cplx>& f, const Grid& grid,
                          std::size_t stride = 1) const;
};

/// Linearizes the GPE around a real stationary state:
///   A u + B v = omega u,  -B u - A v = omega v,
///   A = -1/2 d^2/dx^2 + V - mu + 2 g phi^2,  B = g phi^2,
/// with fourth-order central differences. Each parity sector is solved as a
/// dense non-Hermitian eigenproblem.
BdgSpectrum bdg_spectrum(const StationaryState& state, const PotentialField& v, double g,
                         const BdgOptions& opts = {});

/// max Im omega of the odd (antisymmetric) state at separation d.
double odd_state_growth_rate(GridPtr grid, double d, double g, const BdgOptions& opts = {},
                             const StationaryOptions& sopts = {});

struct CriticalSeparation {
  double d_crit = 0.0;
  std::vector<std::pair<double, double>> scan;  // (d, max Im omega)
};

/// Onset of Im omega > 1e-3 for the odd state: coarse scan over [d_lo, d_hi]
/// then bisection down to `tol`. Throws NumericalError when no onset is found.
CriticalSeparation critical_separation(GridPtr grid, double g, double d_lo, double d_hi,
                                       double tol, const BdgOptions& opts = {},
                                       const StationaryOptions& sopts = {});

inline constexpr double kInstabilityThreshold = 1e-3;

}  // namespace bec
