#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "bec/fft.hpp"
#include "bec/grid.hpp"
#include "bec/observables.hpp"
#include "bec/propagator.hpp"

namespace bec {

/// Fluctuating potential, white in time with spatial correlation
///   <V(x,t) V(x',t')> = 2 gamma delta(t - t') C(x - x'),
///   C(s) = l^2 / (s^2 + l^2).
struct NoiseSpec {
  double gamma = 0.0;
  double corr_length = 0.5;
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;
/// Seed of realization i: seed xor splitmix64(i).
std::uint64_t realization_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Spatial power spectrum of C: pi l exp(-l |k|).
double lorentzian_spectrum(double k, double corr_length);

/// Draws time slices of the noise potential: spatial white noise filtered by
/// sqrt(S(k) / dx) and scaled by sqrt(2 gamma / dt). A complex draw yields
/// two independent real slices, handed out one after the other.
class NoiseField final : public PotentialNoise {
public:
  NoiseField(GridPtr grid, const NoiseSpec& spec, double dt, std::uint64_t stream_seed);
  void next(std::span<double> out) override;

private:
  GridPtr grid_;
  NoiseSpec spec_;
  double scale_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
  Fft fft_;
  std::vector<double> filter_;  // sqrt(S(k_m)/dx) / n
  std::vector<cplx> work_;
  bool spare_ = false;
};

struct EnsembleResult {
  double theta = 0.0;
  std::size_t n_realizations = 0;
  double mean_p0 = 0.0, mean_p1 = 0.0, mean_pex = 0.0;
  double stderr_p0 = 0.0, stderr_p1 = 0.0, stderr_pex = 0.0;
};

/// Means and standard errors (sample standard deviation / sqrt(n)), summed
/// in realization order.
EnsembleResult summarize_ensemble(double theta, std::span<const Populations> runs);

}  // namespace bec
