#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bec/fft.hpp"
#include "bec/grid.hpp"
#include "bec/kernels.hpp"
#include "bec/potentials.hpp"
#include "bec/time_series.hpp"

namespace bec {

enum class TimeMode { real, imaginary };

struct StepperConfig {
  double dt = 1e-3;
  TimeMode mode = TimeMode::real;
  bool renormalize = false;  // always on in imaginary time
  kernels::Backend backend = kernels::Backend::parallel;
  // Real time only: cap the kinetic phase dt k^2/2 at pi/2. On the default
  // grid it would otherwise reach pi near the Nyquist mode, where the split
  // step resonantly pumps grid-scale noise through the nonlinearity. The cap
  // keeps the step unitary and only touches modes with negligible weight.
  bool cap_kinetic_phase = true;

  void validate() const;
  bool renormalizes() const noexcept { return renormalize || mode == TimeMode::imaginary; }
};

/// Source of a stochastic potential slice, drawn once per time step.
class PotentialNoise {
public:
  virtual ~PotentialNoise() = default;
  virtual void next(std::span<double> out) = 0;
};

/// Second-order Strang splitting of
///   i dPhi/dt = [-1/2 d^2/dx^2 + V + g|Phi|^2] Phi
/// with the kinetic factor applied spectrally. Imaginary-time mode replaces
/// dt by -i dt and renormalizes after every step.
class SplitStepPropagator {
public:
  SplitStepPropagator(GridPtr grid, double g, StepperConfig cfg);

  /// One full step t -> t + dt. `v_start` is V(t), `v_end` is V(t + dt);
  /// `noise` (optional) is added to both potential half-steps.
  void step(WaveFunction& psi, std::span<const double> v_start, std::span<const double> v_end,
            std::span<const double> noise = {});
  void step(WaveFunction& psi, std::span<const double> v) { step(psi, v, v); }

  /// Norm ||Phi|| after the last step, before any renormalization.
  double last_norm() const noexcept { return last_norm_; }
  /// Imaginary-time chemical potential estimate -ln(||Phi||)/dt from the last step.
  double norm_decay_mu() const;

  const StepperConfig& config() const noexcept { return cfg_; }
  double coupling() const noexcept { return g_; }
  const Grid& grid() const noexcept { return *grid_; }

  // Fused real-time stepping used by evolve(): consecutive potential
  // half-steps share the same density, so they are applied as one phase.
  // The state is only a valid time slice after flush_fused().
  void advance_fused(WaveFunction& psi, std::span<const double> v_now,
                     std::span<const double> noise = {});
  void flush_fused(WaveFunction& psi, std::span<const double> v_now);
  bool fused_pending() const noexcept { return pending_; }

private:
  void kinetic(WaveFunction& psi);

  GridPtr grid_;
  double g_;
  StepperConfig cfg_;
  Fft fft_;
  std::vector<cplx> kinetic_phase_;    // exp(-i dt k^2/2) / n
  std::vector<double> kinetic_decay_;  // exp(-dt k^2/2) / n
  std::vector<double> noise_prev_;
  std::vector<double> noise_mix_;
  bool pending_ = false;
  bool pending_has_noise_ = false;
  double last_norm_ = 1.0;
};

/// Scalar measurement recorded along an evolution.
struct Observer {
  std::string label;
  std::function<double(double t, const WaveFunction&)> measure;
};

struct EvolveOptions {
  std::vector<Observer> observers;
  /// Observation stride in steps; 0 disables observation.
  std::size_t observe_every = 0;
  /// Extra callback at every observation point (snapshots, trackers).
  std::function<void(double t, const WaveFunction&)> on_observe;
  PotentialNoise* noise = nullptr;
};

/// Time dependence of the double-well separation plus an optional imprint.
struct Schedule {
  std::function<double(double)> separation;
  std::optional<double> imprint_time;
  double theta = 0.0;

  static Schedule from(const TrapProtocol& protocol);
  static Schedule frozen(double d);
};

struct EvolveResult {
  WaveFunction state;
  std::vector<TimeSeries> series;
  std::size_t steps = 0;
  double max_norm_drift = 0.0;  // max |norm^2 - 1| seen at observation points
};

/// Steps psi0 from t0 to t1 (a whole number of steps). An imprint scheduled
/// in (t0, t1] is applied exactly on its step boundary; a dt that does not
/// land on it is rejected with ConfigError. Observers fire at t0 and every
/// `observe_every` steps.
EvolveResult evolve(WaveFunction psi0, const Schedule& schedule, double g, double t0, double t1,
                    const StepperConfig& cfg, const EvolveOptions& options = {});

EvolveResult evolve(WaveFunction psi0, const TrapProtocol& protocol, double g, double t0,
                    double t1, const StepperConfig& cfg, const EvolveOptions& options = {});

/// Multiplies by e^{i theta} on x > 0 and e^{i theta/2} at x = 0.
void imprint_phase(WaveFunction& psi, double theta);

/// Number of dt steps covering `span`; throws ConfigError if not whole.
std::size_t whole_steps(double span, double dt, const char* what);

}  // namespace bec
