#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

namespace bec {

using cplx = std::complex<double>;

/// Uniform periodic 1D grid on [-half_width, half_width) in oscillator units.
///
/// Points are x_i = -half_width + i*dx, so x = 0 sits exactly on index n/2
/// and the reflection x -> -x maps index i onto (n - i) mod n.
class Grid {
public:
  Grid(std::size_t n_points, double half_width);

  std::size_t size() const noexcept { return n_; }
  double half_width() const noexcept { return half_width_; }
  double length() const noexcept { return 2.0 * half_width_; }
  double dx() const noexcept { return dx_; }

  std::span<const double> x() const noexcept { return x_; }
  /// Discrete-transform wavenumbers in FFT order. The Nyquist entry is
  /// stored as 0 (odd-derivative convention) so the set sums to zero.
  std::span<const double> wavenumbers() const noexcept { return k_; }
  /// k^2 in FFT order, Nyquist included as (pi/dx)^2.
  std::span<const double> k_squared() const noexcept { return k2_; }

  std::size_t center_index() const noexcept { return n_ / 2; }
  std::size_t mirror_index(std::size_t i) const noexcept { return (n_ - i) % n_; }

  bool operator==(const Grid& other) const noexcept {
    return n_ == other.n_ && half_width_ == other.half_width_;
  }

private:
  std::size_t n_;
  double half_width_;
  double dx_;
  std::vector<double> x_;
  std::vector<double> k_;
  std::vector<double> k2_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Throws ConfigError for n_points < 8, odd n_points or half_width <= 0.
GridPtr make_grid(std::size_t n_points, double half_width);

/// Complex order parameter sampled on a grid.
class WaveFunction {
public:
  explicit WaveFunction(GridPtr grid);
  WaveFunction(GridPtr grid, std::vector<cplx> values);

  const Grid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<cplx> values() noexcept { return values_; }
  std::span<const cplx> values() const noexcept { return values_; }
  cplx& operator[](std::size_t i) noexcept { return values_[i]; }
  const cplx& operator[](std::size_t i) const noexcept { return values_[i]; }

  double norm_squared() const noexcept;
  /// Rescales to unit norm; throws NumericalError for a zero or non-finite field.
  void normalize();
  std::vector<double> density() const;

private:
  GridPtr grid_;
  std::vector<cplx> values_;
};

/// Riemann sum of conj(a)*b*dx. Throws ConfigError when the grids differ.
cplx inner_product(const WaveFunction& a, const WaveFunction& b);

/// |Phi|^2 at the box edge relative to the peak density.
double boundary_density_ratio(const WaveFunction& psi);
inline bool is_confined(const WaveFunction& psi, double max_ratio = 1e-8) {
  return boundary_density_ratio(psi) < max_ratio;
}

WaveFunction conjugate(const WaveFunction& psi);

/// Sample a callable f(x) -> cplx on the grid.
template <typename F>
WaveFunction sample(GridPtr grid, F&& f) {
  WaveFunction psi(grid);
  const auto xs = grid->x();
  for (std::size_t i = 0; i < xs.size(); ++i) psi[i] = f(xs[i]);
  return psi;
}

// Field I/O. CSV columns are x, Re, Im, |Phi|^2 printed with 17 significant
// digits. The binary dump is little-endian: 8-byte magic "BECFLD01",
// uint64 n_points, float64 half_width, then n_points (re, im) float64 pairs.
void write_field_csv(const WaveFunction& psi, const std::filesystem::path& path);
void write_field_binary(const WaveFunction& psi, const std::filesystem::path& path);
WaveFunction read_field_binary(const std::filesystem::path& path);

}  // namespace bec
