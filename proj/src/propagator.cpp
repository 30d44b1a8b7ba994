#include "bec/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bec/errors.hpp"
#include "bec/format.hpp"

namespace bec {

void StepperConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("stepper: dt must be > 0");
}

SplitStepPropagator::SplitStepPropagator(GridPtr grid, double g, StepperConfig cfg)
    : grid_(std::move(grid)), g_(g), cfg_(cfg), fft_(grid_->size()) {
  cfg_.validate();
  if (cfg_.mode == TimeMode::imaginary) cfg_.renormalize = true;
  const std::size_t n = grid_->size();
  const auto k2 = grid_->k_squared();
  const double inv_n = 1.0 / static_cast<double>(n);
  if (cfg_.mode == TimeMode::real) {
    kinetic_phase_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double a = 0.5 * cfg_.dt * k2[i];
      if (cfg_.cap_kinetic_phase) a = std::min(a, 0.5 * M_PI);
      kinetic_phase_[i] = cplx(std::cos(a), -std::sin(a)) * inv_n;
    }
  } else {
    kinetic_decay_.resize(n);
    for (std::size_t i = 0; i < n; ++i) kinetic_decay_[i] = std::exp(-0.5 * cfg_.dt * k2[i]) * inv_n;
  }
  noise_prev_.assign(n, 0.0);
  noise_mix_.assign(n, 0.0);
}

void SplitStepPropagator::kinetic(WaveFunction& psi) {
  auto v = psi.values();
  fft_.forward(v);
  if (cfg_.mode == TimeMode::real)
    kernels::multiply(cfg_.backend, v, std::span<const cplx>(kinetic_phase_));
  else
    kernels::multiply(cfg_.backend, v, std::span<const double>(kinetic_decay_));
  fft_.backward(v);
}

void SplitStepPropagator::step(WaveFunction& psi, std::span<const double> v_start,
                               std::span<const double> v_end, std::span<const double> noise) {
  if (pending_) throw NumericalError("propagator: fused step pending; flush first");
  const double half = 0.5 * cfg_.dt;
  auto v = psi.values();
  if (cfg_.mode == TimeMode::real) {
    kernels::nonlinear_phase(cfg_.backend, v, v_start, noise, g_, half);
    kinetic(psi);
    kernels::nonlinear_phase(cfg_.backend, v, v_end, noise, g_, half);
  } else {
    if (!noise.empty()) throw ConfigError("propagator: noise is not defined in imaginary time");
    kernels::nonlinear_decay(cfg_.backend, v, v_start, g_, half);
    kinetic(psi);
    kernels::nonlinear_decay(cfg_.backend, v, v_end, g_, half);
  }
  const double n2 = psi.norm_squared();
  if (!std::isfinite(n2) || n2 <= 0.0)
    throw NumericalError("propagator: non-finite field (norm^2 = " + format_double(n2) +
                         "); step too large or box too small");
  last_norm_ = std::sqrt(n2);
  if (cfg_.renormalizes()) {
    const double s = 1.0 / last_norm_;
    for (auto& z : v) z *= s;
  }
}

double SplitStepPropagator::norm_decay_mu() const { return -std::log(last_norm_) / cfg_.dt; }

void SplitStepPropagator::advance_fused(WaveFunction& psi, std::span<const double> v_now,
                                        std::span<const double> noise) {
  if (cfg_.mode != TimeMode::real) throw ConfigError("propagator: fused stepping is real-time only");
  auto v = psi.values();
  const bool has_noise = !noise.empty();
  if (pending_) {
    // Closing half of the previous step and opening half of this one; the
    // noise slices of the two steps each enter with weight dt/2.
    std::span<const double> extra;
    if (has_noise && pending_has_noise_) {
      kernels::average(cfg_.backend, noise_mix_, noise_prev_, noise);
      extra = noise_mix_;
    } else if (has_noise || pending_has_noise_) {
      const auto src = has_noise ? noise : std::span<const double>(noise_prev_);
      for (std::size_t i = 0; i < noise_mix_.size(); ++i) noise_mix_[i] = 0.5 * src[i];
      extra = noise_mix_;
    }
    kernels::nonlinear_phase(cfg_.backend, v, v_now, extra, g_, cfg_.dt);
  } else {
    kernels::nonlinear_phase(cfg_.backend, v, v_now, noise, g_, 0.5 * cfg_.dt);
  }
  kinetic(psi);
  if (has_noise) std::copy(noise.begin(), noise.end(), noise_prev_.begin());
  pending_has_noise_ = has_noise;
  pending_ = true;
}

void SplitStepPropagator::flush_fused(WaveFunction& psi, std::span<const double> v_now) {
  if (!pending_) return;
  std::span<const double> extra;
  if (pending_has_noise_) extra = noise_prev_;
  kernels::nonlinear_phase(cfg_.backend, psi.values(), v_now, extra, g_, 0.5 * cfg_.dt);
  pending_ = false;
  pending_has_noise_ = false;
}

Schedule Schedule::from(const TrapProtocol& protocol) {
  Schedule s;
  s.separation = [protocol](double t) { return bec::separation(t, protocol); };
  s.imprint_time = protocol.imprint_time();
  s.theta = protocol.theta;
  return s;
}

Schedule Schedule::frozen(double d) {
  Schedule s;
  s.separation = [d](double) { return d; };
  return s;
}

void imprint_phase(WaveFunction& psi, double theta) {
  kernels::imprint(kernels::Backend::parallel, psi.values(), psi.grid().x(), theta);
}

std::size_t whole_steps(double span, double dt, const char* what) {
  const double ratio = span / dt;
  const double rounded = std::round(ratio);
  if (!(rounded >= 0.0) || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError(std::string("evolve: dt = ") + format_double(dt) + " does not divide the " +
                      what + " (" + format_double(span) + ")");
  return static_cast<std::size_t>(rounded);
}

namespace {

// V(x, t) on the grid with the cache-on-unchanged-d rule.
class ScheduledPotential {
public:
  ScheduledPotential(const Grid& grid, const Schedule& s, kernels::Backend b)
      : grid_(grid), schedule_(s), backend_(b), values_(grid.size()) {}

  std::span<const double> at(double t) {
    const double d = schedule_.separation(t);
    if (!(std::abs(d - cached_) < 1e-12)) {
      kernels::double_well(backend_, values_, grid_.x(), d);
      cached_ = d;
    }
    return values_;
  }

private:
  const Grid& grid_;
  const Schedule& schedule_;
  kernels::Backend backend_;
  std::vector<double> values_;
  double cached_ = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace

EvolveResult evolve(WaveFunction psi0, const Schedule& schedule, double g, double t0, double t1,
                    const StepperConfig& cfg, const EvolveOptions& options) {
  cfg.validate();
  if (!(t1 >= t0)) throw ConfigError("evolve: empty or reversed time range");
  const std::size_t n_steps = whole_steps(t1 - t0, cfg.dt, "time range");

  std::optional<std::size_t> imprint_step;
  if (schedule.imprint_time && *schedule.imprint_time > t0 && *schedule.imprint_time <= t1)
    imprint_step = whole_steps(*schedule.imprint_time - t0, cfg.dt, "imprint time");

  if (options.noise && cfg.mode != TimeMode::real)
    throw ConfigError("evolve: noise requires real-time mode");

  const GridPtr grid = psi0.grid_ptr();
  SplitStepPropagator prop(grid, g, cfg);
  ScheduledPotential potential(*grid, schedule, cfg.backend);

  EvolveResult result{std::move(psi0), {}, n_steps, 0.0};
  WaveFunction& psi = result.state;
  for (const auto& o : options.observers) result.series.emplace_back(o.label);

  std::vector<double> noise;
  if (options.noise) noise.resize(grid->size());

  auto time_at = [&](std::size_t n) { return t0 + static_cast<double>(n) * cfg.dt; };
  auto observe = [&](std::size_t n) {
    const double t = time_at(n);
    const double n2 = psi.norm_squared();
    if (!std::isfinite(n2))
      throw NumericalError("evolve: non-finite field at t = " + format_double(t) +
                           "; step too large or box too small");
    result.max_norm_drift = std::max(result.max_norm_drift, std::abs(n2 - 1.0));
    for (std::size_t k = 0; k < options.observers.size(); ++k)
      result.series[k].push(t, options.observers[k].measure(t, psi));
    if (options.on_observe) options.on_observe(t, psi);
  };
  const bool observing = options.observe_every > 0;
  auto wants_observation = [&](std::size_t n) {
    return observing && n % options.observe_every == 0;
  };

  if (wants_observation(0)) observe(0);

  const bool fused = cfg.mode == TimeMode::real;
  std::vector<double> v_start;
  for (std::size_t n = 0; n < n_steps; ++n) {
    const double t = time_at(n);
    if (options.noise) options.noise->next(noise);
    if (fused) {
      prop.advance_fused(psi, potential.at(t), noise);
    } else {
      const auto vs = potential.at(t);
      v_start.assign(vs.begin(), vs.end());
      prop.step(psi, v_start, potential.at(time_at(n + 1)));
    }

    const std::size_t done = n + 1;
    const bool event = (imprint_step && *imprint_step == done) || wants_observation(done) ||
                       done == n_steps || done % 256 == 0;
    if (!event) continue;
    if (fused) prop.flush_fused(psi, potential.at(time_at(done)));
    if (imprint_step && *imprint_step == done) imprint_phase(psi, schedule.theta);
    if (wants_observation(done)) {
      observe(done);
    } else if (done % 256 == 0) {
      const double n2 = psi.norm_squared();
      if (!std::isfinite(n2))
        throw NumericalError("evolve: non-finite field at t = " + format_double(time_at(done)) +
                             "; step too large or box too small");
    }
  }
  return result;
}

EvolveResult evolve(WaveFunction psi0, const TrapProtocol& protocol, double g, double t0,
                    double t1, const StepperConfig& cfg, const EvolveOptions& options) {
  protocol.validate();
  return evolve(std::move(psi0), Schedule::from(protocol), g, t0, t1, cfg, options);
}

}  // namespace bec
