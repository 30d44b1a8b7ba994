#pragma once

#include <optional>
#include <span>

#include "bec/fft.hpp"
#include "bec/grid.hpp"
#include "bec/stationary.hpp"
#include "bec/time_series.hpp"

namespace bec {

struct Populations {
  double p0 = 0.0;
  double p1 = 0.0;
  double pex = 0.0;  // 1 - p0 - p1, clamped to [0, 1]
};

/// Projections |<phi_k|Phi>|^2 onto the two analysis eigenstates.
Populations populations(const WaveFunction& psi, const StationaryState& phi0,
                        const StationaryState& phi1);

/// Density-weighted first moment.
double mean_position(const WaveFunction& psi);
/// sqrt(<x^2> - <x>^2); follows the breathing of the background.
double rms_width(const WaveFunction& psi);

/// E = int 1/2 |dPhi/dx|^2 + V |Phi|^2 + g/2 |Phi|^4, kinetic part spectral.
double gpe_energy(const WaveFunction& psi, std::span<const double> v, double g, const Fft& fft);
double gpe_energy(const WaveFunction& psi, std::span<const double> v, double g);

struct Dip {
  double position = 0.0;
  double density = 0.0;     // interpolated density at the bottom
  double background = 0.0;  // lower of the two flanking maxima
};

/// Minimum density contrast 1 - rho_dip / rho_background for a local
/// minimum to count as a soliton rather than a ripple of the background.
inline constexpr double kMinDipContrast = 0.1;

/// Interior local minimum of |Phi|^2 with |x - centre| < 0.9 * search_radius,
/// refined by a parabola through the three lowest samples. With `previous`
/// the candidate nearest to it wins, otherwise the deepest one.
std::optional<Dip> soliton_position(const WaveFunction& psi, double search_radius,
                                    std::optional<double> previous = std::nullopt,
                                    double centre = 0.0);

/// Thomas-Fermi radius sqrt(2 mu_TF(g)) of the harmonic trap; 0 for g <= 0.
double thomas_fermi_radius(double g);

struct SolitonTrack {
  TimeSeries series{"q"};
  TimeSeries depth{"dip_density"};
  bool lost = false;
  std::optional<double> lost_at;
};

/// Follows one dip through a sequence of snapshots, searching around the
/// instantaneous centre of mass so a sloshing cloud keeps its soliton in
/// view. The track is lost when no dip is found or the nearest one jumps by
/// more than the distance a sound wave covers between snapshots; it is
/// never re-acquired. The allowed jump also includes the centre-of-mass shift.
class SolitonTracker {
public:
  SolitonTracker(double search_radius, double sound_speed)
      : radius_(search_radius), sound_speed_(sound_speed) {}
  void observe(double t, const WaveFunction& psi);
  const SolitonTrack& track() const noexcept { return track_; }
  /// True when every observation found the dip.
  bool tracked_throughout() const noexcept { return !track_.lost && !track_.series.empty(); }

private:
  double radius_;
  double sound_speed_;
  std::optional<double> last_time_;
  double last_centre_ = 0.0;
  SolitonTrack track_;
};

/// (max - min) / 2 after dropping the first quarter of the window. Throws
/// NumericalError when fewer than 8 samples remain or a non-constant
/// series crosses its mean fewer than three times.
double oscillation_amplitude(const TimeSeries& s);

struct SinusoidFit {
  double omega = 0.0;
  double amplitude = 0.0;
  double offset = 0.0;
  double rms_residual = 0.0;
};

/// Least-squares fit of c + a cos(w t) + b sin(w t) with w searched in
/// [omega_min, omega_max] (dense scan, then golden-section refinement).
SinusoidFit fit_sinusoid(const TimeSeries& s, double omega_min, double omega_max);

/// Mean period from the spacing of mean-value crossings. Throws
/// NumericalError with fewer than three crossings.
double crossing_period(const TimeSeries& s);

}  // namespace bec
