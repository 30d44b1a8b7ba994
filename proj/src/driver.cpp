#include "bec/driver.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>

#include "bec/errors.hpp"
#include "bec/fft.hpp"
#include "bec/format.hpp"
#include "bec/propagator.hpp"

namespace bec {

namespace {

std::unique_ptr<StateCache> open_cache(const RunConfig& cfg) {
  if (cfg.state_cache.empty()) return nullptr;
  return std::make_unique<StateCache>(cfg.state_cache);
}

// Least-squares slope of v against t.
double slope(std::span<const double> t, std::span<const double> v) {
  const auto n = static_cast<double>(t.size());
  double st = 0.0, sv = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sv += v[i];
  }
  st /= n;
  sv /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    num += (t[i] - st) * (v[i] - sv);
    den += (t[i] - st) * (t[i] - st);
  }
  return num / den;
}

std::size_t step_index(double t, double dt) { return static_cast<std::size_t>(std::llround(t / dt)); }

// Rethrows the stored exception of the lowest index, so parallel failures
// surface the same way for every thread count.
void rethrow_first(const std::vector<std::exception_ptr>& errors) {
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

Setup prepare(const RunConfig& cfg) {
  const GridPtr grid = make_grid(cfg.n_points, cfg.half_width);
  const double g = cfg.coupling();
  const auto cache = open_cache(cfg);
  StationaryState phi0 = with_stage("ground state", [&] {
    return stationary_at(grid, 0.0, g, Parity::even, {}, cache.get());
  });
  StationaryState phi1 = with_stage("first excited state", [&] {
    return stationary_at(grid, 0.0, g, Parity::odd, {}, cache.get());
  });
  return Setup{grid, g, std::move(phi0), std::move(phi1)};
}

RunResult run_interferometer(const RunConfig& cfg, const Setup& setup, const RunOptions& opts) {
  const TrapProtocol& protocol = cfg.protocol;
  const double dt = cfg.stepper.dt;
  StepperConfig sc = cfg.stepper;
  sc.mode = TimeMode::real;

  RunResult out;
  out.theta = protocol.theta;
  const bool record = opts.record && cfg.obs_stride > 0.0;
  const std::size_t obs_steps = record ? whole_steps(cfg.obs_stride, dt, "observation stride") : 0;

  std::size_t snap_every = 0;
  std::vector<std::size_t> snap_at;
  if (record) {
    if (cfg.snapshot_every > 0.0) {
      snap_every = whole_steps(cfg.snapshot_every, dt, "snapshot spacing");
      if (snap_every % obs_steps != 0)
        throw ConfigError("run: snapshot spacing must be a multiple of the observation stride");
    }
    for (const double t : cfg.snapshot_times) {
      const std::size_t k = whole_steps(t, dt, "snapshot time");
      if (k % obs_steps != 0)
        throw ConfigError("run: snapshot time " + format_double(t) +
                          " is not on the observation grid");
      snap_at.push_back(k);
    }
  }

  const double g = setup.g;
  const double sound_speed = g > 0.0 ? std::sqrt(setup.phi0.chemical_potential) : 0.0;
  SolitonTracker tracker(thomas_fermi_radius(g), sound_speed);
  const PotentialField harmonic = double_well_field(*setup.grid, 0.0);
  const Fft fft(setup.grid->size());

  auto observe = [&](double t, const WaveFunction& psi) {
    if (!out.mean_x.empty() && !(t > out.mean_x.times.back())) return;
    out.mean_x.push(t, mean_position(psi));
    out.width.push(t, rms_width(psi));
    const std::size_t k = step_index(t, dt);
    const bool snap = (snap_every && k % snap_every == 0) ||
                      std::find(snap_at.begin(), snap_at.end(), k) != snap_at.end();
    if (snap) out.snapshots.push_back({t, psi.density()});
  };
  auto observe_hold = [&](double t, const WaveFunction& psi) {
    observe(t, psi);
    const Populations p = populations(psi, setup.phi0, setup.phi1);
    out.p0.push(t, p.p0);
    out.p1.push(t, p.p1);
    out.pex.push(t, p.pex);
    out.energy.push(t, gpe_energy(psi, harmonic.values, g, fft));
    tracker.observe(t, psi);
  };

  EvolveOptions split;
  split.observe_every = obs_steps;
  split.noise = opts.noise;
  if (record) split.on_observe = observe;
  EvolveResult first = with_stage("split and recombine", [&] {
    return evolve(setup.phi0.wavefunction, protocol, g, 0.0, protocol.tau, sc, split);
  });
  out.steps = first.steps;
  out.max_norm_drift = first.max_norm_drift;
  out.max_norm_drift = std::max(out.max_norm_drift, std::abs(first.state.norm_squared() - 1.0));
  out.populations = populations(first.state, setup.phi0, setup.phi1);

  if (opts.hold && protocol.hold_time > 0.0) {
    EvolveOptions hold;
    hold.observe_every = obs_steps;
    hold.noise = opts.noise;
    if (record) hold.on_observe = observe_hold;
    EvolveResult second = with_stage("hold", [&] {
      return evolve(std::move(first.state), protocol, g, protocol.tau, protocol.end_time(), sc,
                    hold);
    });
    out.steps += second.steps;
    out.max_norm_drift = std::max(out.max_norm_drift, second.max_norm_drift);
    out.max_norm_drift =
        std::max(out.max_norm_drift, std::abs(second.state.norm_squared() - 1.0));
  }

  if (!out.energy.empty()) {
    const TimeSeries hold_x = out.mean_x.window(protocol.tau, protocol.end_time());
    try {
      out.dipole_amplitude = oscillation_amplitude(hold_x);
    } catch (const NumericalError&) {
    }
    if (out.dipole_amplitude && *out.dipole_amplitude > 1e-6 && hold_x.size() >= 8)
      out.dipole_frequency = fit_sinusoid(hold_x, 0.5, 1.5).omega;

    std::vector<double> rel(out.energy.values);
    const double e0 = rel.front();
    if (out.energy.size() >= 2 && e0 != 0.0) {
      for (double& e : rel) e /= e0;
      out.energy_drift_rate = slope(out.energy.times, rel);
    }

    out.soliton = tracker.track();
    out.soliton_found = g > 0.0 && tracker.tracked_throughout();
    const TimeSeries& q = out.soliton.series;
    if (out.soliton_found) {
      try {
        out.soliton_amplitude = oscillation_amplitude(q);
      } catch (const NumericalError&) {
      }
    }
    if (q.size() >= 8) {
      try {
        out.soliton_period = crossing_period(q);
      } catch (const NumericalError&) {
      }
    }
  }
  return out;
}

RunResult run_interferometer(const RunConfig& cfg) {
  const Setup setup = prepare(cfg);
  if (cfg.noise.gamma > 0.0) {
    NoiseField noise(setup.grid, cfg.noise, cfg.stepper.dt, realization_seed(cfg.noise.seed, 0));
    return run_interferometer(cfg, setup, RunOptions{&noise, true, true});
  }
  return run_interferometer(cfg, setup);
}

std::vector<ScanRow> scan_phase(const RunConfig& cfg, const Setup& setup,
                                std::vector<double> thetas, int jobs) {
  if (thetas.size() < 2) throw ConfigError("scan-phase: need at least two phases");
  std::sort(thetas.begin(), thetas.end());
  std::vector<ScanRow> rows(thetas.size());
  const auto n = static_cast<long>(thetas.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(jobs, 1))
  for (long i = 0; i < n; ++i) {
    ScanRow& row = rows[static_cast<std::size_t>(i)];
    row.theta = thetas[static_cast<std::size_t>(i)];
    try {
      RunConfig c = cfg;
      c.protocol.theta = row.theta;
      std::unique_ptr<NoiseField> noise;
      if (c.noise.gamma > 0.0)
        noise = std::make_unique<NoiseField>(setup.grid, c.noise, c.stepper.dt,
                                             realization_seed(c.noise.seed, 0));
      row.result = run_interferometer(c, setup, RunOptions{noise.get(), true, true});
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }
  return rows;
}

EnsembleRun run_ensemble(const RunConfig& cfg, const Setup& setup, double theta, int jobs) {
  if (cfg.n_realizations < 2) throw ConfigError("ensemble: need at least two realizations");
  RunConfig c = cfg;
  c.protocol.theta = theta;
  EnsembleRun out;
  out.realizations.resize(cfg.n_realizations);
  std::vector<std::exception_ptr> errors(cfg.n_realizations);
  const auto n = static_cast<long>(cfg.n_realizations);
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(jobs, 1))
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      std::unique_ptr<NoiseField> noise;
      if (c.noise.gamma > 0.0)
        noise = std::make_unique<NoiseField>(setup.grid, c.noise, c.stepper.dt,
                                             realization_seed(c.noise.seed, k));
      out.realizations[k] =
          run_interferometer(c, setup, RunOptions{noise.get(), false, false}).populations;
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  rethrow_first(errors);
  out.summary = summarize_ensemble(theta, out.realizations);
  return out;
}

CoherenceLimits coherence_limits(double n_atoms, double g, double trap_ratio, double tau) {
  if (!(n_atoms >= 1.0)) throw ConfigError("limits: need N >= 1");
  if (!(g > 0.0)) throw ConfigError("limits: need g > 0");
  CoherenceLimits out;
  out.t_phi = n_atoms / (trap_ratio + thomas_fermi_mu(g));
  out.tau_diff = std::pow(2.0 * std::sqrt(3.0) / g, 2.0 / 3.0) * std::sqrt(n_atoms);
  out.tau_within = tau < out.tau_diff;
  return out;
}

GrowthCheck seeded_growth_rate(GridPtr grid, double d, double g, double eps, double t_end,
                               double dt) {
  GrowthCheck out;
  out.separation = d;
  const PotentialField field = double_well_field(*grid, d);
  const StationaryState even = stationary_at(grid, d, g, Parity::even);
  const StationaryState odd = stationary_at(grid, d, g, Parity::odd);
  BdgOptions bopts;
  bopts.check_refinement = false;
  const BdgSpectrum spectrum = bdg_spectrum(odd, field, g, bopts);
  const BdgMode* unstable = nullptr;
  for (const auto& m : spectrum.modes)
    if (!unstable || m.frequency.imag() > unstable->frequency.imag()) unstable = &m;
  if (!unstable || !(unstable->frequency.imag() > kInstabilityThreshold))
    throw NumericalError("growth check: odd state is stable at d = " + format_double(d));
  out.bdg_rate = 2.0 * unstable->frequency.imag();

  const auto u = spectrum.embed(unstable->u, *grid);
  const auto v = spectrum.embed(unstable->v, *grid);
  WaveFunction psi = odd.wavefunction;
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] += eps * (u[i] + std::conj(v[i]));
  psi.normalize();

  StepperConfig sc;
  sc.dt = dt;
  EvolveOptions eo;
  eo.observe_every = whole_steps(0.05, dt, "growth sampling");
  eo.on_observe = [&](double t, const WaveFunction& s) {
    out.p0.push(t, std::norm(inner_product(even.wavefunction, s)));
  };
  evolve(std::move(psi), Schedule::frozen(d), g, 0.0, t_end, sc, eo);

  // Fit log p0 once the seed has settled into the growing mode and before
  // the population saturates.
  std::vector<double> t, lp;
  for (std::size_t i = 0; i < out.p0.size(); ++i) {
    if (out.p0.times[i] < 1.0) continue;
    if (out.p0.values[i] > 1e-3) break;
    t.push_back(out.p0.times[i]);
    lp.push_back(std::log(out.p0.values[i]));
  }
  if (t.size() < 10) throw NumericalError("growth check: too few samples before saturation");
  out.gpe_rate = slope(t, lp);
  return out;
}

TwoModeRun run_two_mode(const RunConfig& cfg, std::vector<double> thetas, int jobs) {
  const GridPtr grid = make_grid(cfg.n_points, cfg.half_width);
  const double g = cfg.coupling();
  const auto cache = open_cache(cfg);
  const double d_max = 2.0 * cfg.protocol.a;
  const ModeTable table = with_stage("mode table", [&] {
    return ModeTable(grid, d_max, g, cfg.two_mode_points, {}, cache.get());
  });
  TwoModeRun out;
  out.at_zero = table.at(0.0);
  out.at_max = table.at(d_max);
  const double dt = cfg.two_mode_dt;
  const std::size_t record =
      cfg.obs_stride > 0.0 ? whole_steps(cfg.obs_stride, dt, "observation stride") : 0;
  out.single = with_stage("two-mode run", [&] {
    return integrate_two_mode(TwoModeState{}, cfg.protocol, table, dt, record);
  });

  std::sort(thetas.begin(), thetas.end());
  out.rows.resize(thetas.size());
  std::vector<std::exception_ptr> errors(thetas.size());
  const auto n = static_cast<long>(thetas.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(jobs, 1))
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      TrapProtocol p = cfg.protocol;
      p.theta = thetas[k];
      const TwoModeResult r = integrate_two_mode(TwoModeState{}, p, table, dt, 0);
      out.rows[k] = {thetas[k], std::norm(r.final_state.c0), std::norm(r.final_state.c1)};
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  rethrow_first(errors);
  return out;
}

}  // namespace bec
