#include "bec/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <utility>

#include "bec/errors.hpp"

namespace bec {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::span<cplx> data) {
  return reinterpret_cast<fftw_complex*>(data.data());
}

}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
  if (n == 0) throw ConfigError("fft: zero length");
  std::vector<cplx> probe(n);
  std::lock_guard lock(planner_mutex());
  const auto len = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_1d(len, as_fftw(probe), as_fftw(probe), FFTW_FORWARD, flags);
  backward_plan_ = fftw_plan_dft_1d(len, as_fftw(probe), as_fftw(probe), FFTW_BACKWARD, flags);
  if (!forward_plan_ || !backward_plan_) throw NumericalError("fft: plan creation failed");
}

Fft::~Fft() {
  if (!forward_plan_ && !backward_plan_) return;
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (backward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

Fft::Fft(Fft&& other) noexcept
    : n_(other.n_),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      backward_plan_(std::exchange(other.backward_plan_, nullptr)) {}

Fft& Fft::operator=(Fft&& other) noexcept {
  if (this != &other) {
    std::swap(n_, other.n_);
    std::swap(forward_plan_, other.forward_plan_);
    std::swap(backward_plan_, other.backward_plan_);
  }
  return *this;
}

void Fft::forward(std::span<cplx> data) const {
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(data), as_fftw(data));
}

void Fft::backward(std::span<cplx> data) const {
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), as_fftw(data), as_fftw(data));
}

void apply_kinetic(const Grid& grid, const Fft& fft, std::span<const cplx> in,
                   std::span<cplx> out) {
  std::copy(in.begin(), in.end(), out.begin());
  fft.forward(out);
  const auto k2 = grid.k_squared();
  const double scale = 0.5 / static_cast<double>(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= k2[i] * scale;
  fft.backward(out);
}

double kinetic_energy(const WaveFunction& psi, const Fft& fft) {
  std::vector<cplx> f(psi.values().begin(), psi.values().end());
  fft.forward(f);
  const auto k2 = psi.grid().k_squared();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += k2[i] * std::norm(f[i]);
  return 0.5 * s * psi.grid().dx() / static_cast<double>(psi.size());
}

double spectral_norm_squared(const WaveFunction& psi, const Fft& fft) {
  std::vector<cplx> f(psi.values().begin(), psi.values().end());
  fft.forward(f);
  double s = 0.0;
  for (const auto& z : f) s += std::norm(z);
  return s * psi.grid().dx() / static_cast<double>(psi.size());
}

}  // namespace bec
