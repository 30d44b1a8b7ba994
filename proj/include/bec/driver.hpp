#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bec/bdg.hpp"
#include "bec/config.hpp"
#include "bec/noise.hpp"
#include "bec/observables.hpp"
#include "bec/stationary.hpp"
#include "bec/two_mode.hpp"

namespace bec {

/// Everything a run shares with its siblings in a scan: the grid, the
/// coupling and the nonlinear eigenstates of the harmonic trap, which are
/// both the initial state and the analysis basis.
struct Setup {
  GridPtr grid;
  double g;
  StationaryState phi0;
  StationaryState phi1;
};

Setup prepare(const RunConfig& cfg);

struct Snapshot {
  double time = 0.0;
  std::vector<double> density;
};

struct RunOptions {
  PotentialNoise* noise = nullptr;
  bool hold = true;       // false: stop at tau (ensembles only need the populations)
  bool record = true;     // series, snapshots and soliton tracking
};

struct RunResult {
  double theta = 0.0;
  Populations populations;  // at the end of recombination, t = tau
  TimeSeries mean_x{"mean_x"};
  TimeSeries width{"width"};
  TimeSeries p0{"p0"}, p1{"p1"}, pex{"pex"};  // along the hold
  TimeSeries energy{"energy"};                // along the hold
  SolitonTrack soliton;
  bool soliton_found = false;  // tracked through the whole hold
  std::optional<double> dipole_amplitude;
  std::optional<double> dipole_frequency;
  std::optional<double> soliton_amplitude;
  std::optional<double> soliton_period;
  double max_norm_drift = 0.0;
  std::optional<double> energy_drift_rate;  // relative energy change per unit time in the hold
  std::vector<Snapshot> snapshots;
  std::size_t steps = 0;
};

RunResult run_interferometer(const RunConfig& cfg, const Setup& setup,
                             const RunOptions& opts = {});
RunResult run_interferometer(const RunConfig& cfg);

struct ScanRow {
  double theta = 0.0;
  std::optional<RunResult> result;
  std::string error;  // set when the run failed
};

/// One run per phase, `jobs` at a time. Rows come back sorted by theta.
std::vector<ScanRow> scan_phase(const RunConfig& cfg, const Setup& setup,
                                std::vector<double> thetas, int jobs);

struct EnsembleRun {
  EnsembleResult summary;
  std::vector<Populations> realizations;
};

/// n_realizations noisy runs at one phase; realization i draws from
/// realization_seed(seed, i). Any failure aborts the ensemble.
EnsembleRun run_ensemble(const RunConfig& cfg, const Setup& setup, double theta, int jobs);

struct CoherenceLimits {
  double t_phi = 0.0;     // N / (trap_ratio + mu_TF(g))
  double tau_diff = 0.0;  // (2 sqrt 3 / g)^(2/3) sqrt N
  bool tau_within = false;  // tau < tau_diff
};

CoherenceLimits coherence_limits(double n_atoms, double g, double trap_ratio, double tau);

/// Seeds the frozen double well at d with phi1 + eps (u + conj v) of the
/// fastest unstable odd-state mode and fits the early exponential growth of
/// the population in the even state.
struct GrowthCheck {
  double separation = 0.0;
  double bdg_rate = 0.0;  // 2 Im omega
  double gpe_rate = 0.0;
  TimeSeries p0{"p0"};
};

GrowthCheck seeded_growth_rate(GridPtr grid, double d, double g, double eps = 1e-4,
                               double t_end = 10.0, double dt = 1e-3);

struct TwoModeScanRow {
  double theta = 0.0;
  double p0 = 0.0;
  double p1 = 0.0;
};

struct TwoModeRun {
  std::vector<TwoModeScanRow> rows;
  TwoModeResult single;  // the time-resolved run at cfg.protocol.theta
  ModeData at_zero;
  ModeData at_max;
};

TwoModeRun run_two_mode(const RunConfig& cfg, std::vector<double> thetas, int jobs);

}  // namespace bec
