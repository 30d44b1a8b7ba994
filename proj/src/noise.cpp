#include "bec/noise.hpp"

#include <cmath>

#include "bec/errors.hpp"
#include "bec/format.hpp"

namespace bec {

void NoiseSpec::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("noise: gamma must be >= 0");
  if (!(corr_length > 0.0) || !std::isfinite(corr_length))
    throw ConfigError("noise: corr_length must be > 0");
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t realization_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return seed ^ splitmix64(index);
}

double lorentzian_spectrum(double k, double corr_length) {
  return M_PI * corr_length * std::exp(-corr_length * std::abs(k));
}

NoiseField::NoiseField(GridPtr grid, const NoiseSpec& spec, double dt, std::uint64_t stream_seed)
    : grid_(std::move(grid)), spec_(spec), rng_(stream_seed), fft_(grid_->size()) {
  spec_.validate();
  if (!(dt > 0.0)) throw ConfigError("noise: dt must be > 0");
  if (!(spec_.corr_length > 2.0 * grid_->dx()))
    throw ConfigError("noise: corr_length " + format_double(spec_.corr_length) +
                      " is not resolved by dx = " + format_double(grid_->dx()));
  scale_ = std::sqrt(2.0 * spec_.gamma / dt);
  const std::size_t n = grid_->size();
  const auto k2 = grid_->k_squared();
  filter_.resize(n);
  for (std::size_t m = 0; m < n; ++m)
    filter_[m] = std::sqrt(lorentzian_spectrum(std::sqrt(k2[m]), spec_.corr_length) /
                           grid_->dx()) /
                 static_cast<double>(n);
  work_.resize(n);
}

void NoiseField::next(std::span<double> out) {
  if (spec_.gamma == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  if (spare_) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale_ * work_[i].imag();
    spare_ = false;
    return;
  }
  for (auto& z : work_) {
    const double re = normal_(rng_);
    const double im = normal_(rng_);
    z = cplx(re, im);
  }
  fft_.forward(work_);
  for (std::size_t m = 0; m < work_.size(); ++m) work_[m] *= filter_[m];
  fft_.backward(work_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale_ * work_[i].real();
  spare_ = true;
}

EnsembleResult summarize_ensemble(double theta, std::span<const Populations> runs) {
  if (runs.size() < 2) throw ConfigError("ensemble: need at least 2 realizations");
  EnsembleResult r;
  r.theta = theta;
  r.n_realizations = runs.size();
  const double n = static_cast<double>(runs.size());
  auto stats = [&](double Populations::*field, double& mean, double& err) {
    double s = 0.0;
    for (const auto& p : runs) s += p.*field;
    mean = s / n;
    double ss = 0.0;
    for (const auto& p : runs) ss += (p.*field - mean) * (p.*field - mean);
    err = std::sqrt(ss / (n - 1.0) / n);
  };
  stats(&Populations::p0, r.mean_p0, r.stderr_p0);
  stats(&Populations::p1, r.mean_p1, r.stderr_p1);
  stats(&Populations::pex, r.mean_pex, r.stderr_pex);
  return r;
}

}  // namespace bec
