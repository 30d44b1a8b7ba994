#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bec/grid.hpp"

namespace bec {

/// In-place complex FFT pair of fixed length (FFTW, estimate-mode plans so
/// the chosen algorithm, and therefore the rounding, never varies between
/// runs). Unnormalized: backward(forward(f)) == n*f.
///
/// Plan creation is serialized internally; execution is thread-safe, so
/// every simulation owns its own Fft and runs independently.
class Fft {
public:
  explicit Fft(std::size_t n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
  Fft(Fft&& other) noexcept;
  Fft& operator=(Fft&& other) noexcept;

  std::size_t size() const noexcept { return n_; }
  void forward(std::span<cplx> data) const;
  void backward(std::span<cplx> data) const;

private:
  std::size_t n_ = 0;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

/// Spectral helpers shared by the propagator, the stationary solver and the
/// observables. `in` and `out` must both have the grid's size.
void apply_kinetic(const Grid& grid, const Fft& fft, std::span<const cplx> in,
                   std::span<cplx> out);
double kinetic_energy(const WaveFunction& psi, const Fft& fft);
/// sum |F_m|^2 * dx / n, i.e. the norm computed in the spectral representation.
double spectral_norm_squared(const WaveFunction& psi, const Fft& fft);

}  // namespace bec
