#include "bec/observables.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bec/errors.hpp"
#include "bec/potentials.hpp"

namespace bec {

Populations populations(const WaveFunction& psi, const StationaryState& phi0,
                        const StationaryState& phi1) {
  Populations p;
  p.p0 = std::norm(inner_product(phi0.wavefunction, psi));
  p.p1 = std::norm(inner_product(phi1.wavefunction, psi));
  p.pex = std::clamp(1.0 - p.p0 - p.p1, 0.0, 1.0);
  return p;
}

double mean_position(const WaveFunction& psi) {
  const auto x = psi.grid().x();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * std::norm(psi[i]);
  return s * psi.grid().dx();
}

double rms_width(const WaveFunction& psi) {
  const auto x = psi.grid().x();
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double rho = std::norm(psi[i]);
    m0 += rho;
    m1 += rho * x[i];
    m2 += rho * x[i] * x[i];
  }
  const double mean = m1 / m0;
  return std::sqrt(std::max(0.0, m2 / m0 - mean * mean));
}

double gpe_energy(const WaveFunction& psi, std::span<const double> v, double g, const Fft& fft) {
  double pot = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double rho = std::norm(psi[i]);
    pot += (v[i] + 0.5 * g * rho) * rho;
  }
  return kinetic_energy(psi, fft) + pot * psi.grid().dx();
}

double gpe_energy(const WaveFunction& psi, std::span<const double> v, double g) {
  Fft fft(psi.size());
  return gpe_energy(psi, v, g, fft);
}

double thomas_fermi_radius(double g) { return std::sqrt(2.0 * thomas_fermi_mu(g)); }

std::optional<Dip> soliton_position(const WaveFunction& psi, double search_radius,
                                    std::optional<double> previous, double centre) {
  const Grid& grid = psi.grid();
  const auto x = grid.x();
  const std::size_t n = grid.size();
  const double limit = 0.9 * search_radius;
  const auto rho = psi.density();

  std::optional<Dip> best;
  double best_score = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(std::abs(x[i] - centre) < limit)) continue;
    if (!(rho[i] <= rho[i - 1] && rho[i] < rho[i + 1])) continue;

    std::size_t l = i - 1;
    while (l > 0 && rho[l - 1] >= rho[l]) --l;
    std::size_t r = i + 1;
    while (r + 1 < n && rho[r + 1] >= rho[r]) ++r;
    const double background = std::min(rho[l], rho[r]);

    const double a = rho[i - 1], b = rho[i], c = rho[i + 1];
    const double curv = a - 2.0 * b + c;
    double offset = 0.0, bottom = b;
    if (curv > 0.0) {
      offset = std::clamp(0.5 * (a - c) / curv, -0.5, 0.5);
      bottom = b - 0.125 * (a - c) * (a - c) / curv;
    }
    if (!(bottom < (1.0 - kMinDipContrast) * background)) continue;

    Dip dip{x[i] + offset * grid.dx(), std::max(bottom, 0.0), background};
    const double score = previous ? std::abs(dip.position - *previous) : dip.density;
    if (!best || score < best_score) {
      best = dip;
      best_score = score;
    }
  }
  return best;
}

void SolitonTracker::observe(double t, const WaveFunction& psi) {
  if (track_.lost) return;
  std::optional<double> previous;
  if (!track_.series.empty()) previous = track_.series.values.back();
  const double centre = mean_position(psi);
  auto dip = soliton_position(psi, radius_, previous, centre);
  if (dip && previous && last_time_) {
    // sound speed is relative to the fluid, which itself sloshes
    const double drift = std::abs(centre - last_centre_);
    const double reach = sound_speed_ * (t - *last_time_) + drift + psi.grid().dx();
    if (std::abs(dip->position - *previous) > reach) dip.reset();
  }
  if (!dip) {
    track_.lost = true;
    track_.lost_at = t;
    return;
  }
  track_.series.push(t, dip->position);
  track_.depth.push(t, dip->density);
  last_time_ = t;
  last_centre_ = centre;
}

namespace {

std::size_t mean_crossings(std::span<const double> t, std::span<const double> v,
                           std::vector<double>* times = nullptr) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  std::size_t count = 0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double a = v[i] - mean, b = v[i + 1] - mean;
    if ((a < 0.0 && b >= 0.0) || (a >= 0.0 && b < 0.0)) {
      ++count;
      if (times) times->push_back(t[i] + (t[i + 1] - t[i]) * a / (a - b));
    }
  }
  return count;
}

}  // namespace

double oscillation_amplitude(const TimeSeries& s) {
  if (s.empty()) throw NumericalError("oscillation amplitude: window too short (no samples)");
  const double t0 = s.times.front();
  const double cut = t0 + 0.25 * (s.times.back() - t0);
  const TimeSeries w = s.window(cut, s.times.back());
  if (w.size() < 8)
    throw NumericalError("oscillation amplitude: window too short (" + std::to_string(w.size()) +
                         " samples)");
  const auto [lo, hi] = std::minmax_element(w.values.begin(), w.values.end());
  const double scale = std::max({std::abs(*lo), std::abs(*hi), 1.0});
  if (*hi - *lo <= 1e-12 * scale) return 0.5 * (*hi - *lo);
  if (mean_crossings(w.times, w.values) < 3)
    throw NumericalError("oscillation amplitude: window too short (fewer than 1.5 periods)");
  return 0.5 * (*hi - *lo);
}

SinusoidFit fit_sinusoid(const TimeSeries& s, double omega_min, double omega_max) {
  if (s.size() < 4) throw NumericalError("sinusoid fit: need at least 4 samples");
  if (!(omega_max > omega_min && omega_min > 0.0))
    throw ConfigError("sinusoid fit: bad frequency range");
  const std::size_t n = s.size();
  const double tc = 0.5 * (s.times.front() + s.times.back());

  auto solve = [&](double w, SinusoidFit* out) {
    Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      const double t = s.times[i] - tc;
      const Eigen::Vector3d f(1.0, std::cos(w * t), std::sin(w * t));
      a += f * f.transpose();
      b += f * s.values[i];
    }
    const Eigen::Vector3d c = a.ldlt().solve(b);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = s.times[i] - tc;
      const double e = s.values[i] - c[0] - c[1] * std::cos(w * t) - c[2] * std::sin(w * t);
      ss += e * e;
    }
    if (out) *out = {w, std::hypot(c[1], c[2]), c[0], std::sqrt(ss / static_cast<double>(n))};
    return ss;
  };

  const double span = s.times.back() - s.times.front();
  const double step = span > 0.0 ? std::min(0.1 * 2.0 * M_PI / span, omega_max - omega_min)
                                 : omega_max - omega_min;
  const auto m = static_cast<std::size_t>(std::ceil((omega_max - omega_min) / step));
  std::size_t best_k = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= m; ++k) {
    const double r = solve(omega_min + (omega_max - omega_min) * k / m, nullptr);
    if (r < best) {
      best = r;
      best_k = k;
    }
  }
  auto omega_at = [&](double k) { return omega_min + (omega_max - omega_min) * k / m; };
  double lo = omega_at(std::max(0.0, best_k - 1.0));
  double hi = omega_at(std::min(static_cast<double>(m), best_k + 1.0));
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
  double fc = solve(c, nullptr), fd = solve(d, nullptr);
  for (int it = 0; it < 100 && hi - lo > 1e-12 * hi; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = solve(c, nullptr);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = solve(d, nullptr);
    }
  }
  SinusoidFit fit;
  solve(0.5 * (lo + hi), &fit);
  return fit;
}

double crossing_period(const TimeSeries& s) {
  std::vector<double> times;
  mean_crossings(s.times, s.values, &times);
  if (times.size() < 3) throw NumericalError("crossing period: fewer than three mean crossings");
  return 2.0 * (times.back() - times.front()) / static_cast<double>(times.size() - 1);
}

}  // namespace bec
