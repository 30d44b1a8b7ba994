#include "bec/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "bec/errors.hpp"
#include "bec/format.hpp"

namespace bec {

Grid::Grid(std::size_t n_points, double half_width)
    : n_(n_points), half_width_(half_width) {
  if (n_points < 8) throw ConfigError("grid: n_points must be at least 8");
  if (n_points % 2 != 0) throw ConfigError("grid: n_points must be even");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw ConfigError("grid: half_width must be positive");

  dx_ = 2.0 * half_width_ / static_cast<double>(n_);
  x_.resize(n_);
  k_.resize(n_);
  k2_.resize(n_);
  const double dk = 2.0 * std::numbers::pi / length();
  const auto half = static_cast<std::ptrdiff_t>(n_ / 2);
  for (std::size_t i = 0; i < n_; ++i) {
    x_[i] = -half_width_ + static_cast<double>(i) * dx_;
    auto m = static_cast<std::ptrdiff_t>(i);
    if (m >= half) m -= static_cast<std::ptrdiff_t>(n_);
    const double k = dk * static_cast<double>(m);
    k2_[i] = k * k;
    k_[i] = (m == -half) ? 0.0 : k;
  }
}

GridPtr make_grid(std::size_t n_points, double half_width) {
  return std::make_shared<const Grid>(n_points, half_width);
}

WaveFunction::WaveFunction(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw ConfigError("wavefunction: null grid");
  values_.assign(grid_->size(), cplx{});
}

WaveFunction::WaveFunction(GridPtr grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw ConfigError("wavefunction: null grid");
  if (values_.size() != grid_->size())
    throw ConfigError("wavefunction: value count does not match grid");
}

double WaveFunction::norm_squared() const noexcept {
  double s = 0.0;
  for (const auto& v : values_) s += std::norm(v);
  return s * grid_->dx();
}

void WaveFunction::normalize() {
  const double n2 = norm_squared();
  if (!(n2 > 0.0) || !std::isfinite(n2))
    throw NumericalError("wavefunction: cannot normalize (norm^2 = " + format_double(n2) + ")");
  const double s = 1.0 / std::sqrt(n2);
  for (auto& v : values_) v *= s;
}

std::vector<double> WaveFunction::density() const {
  std::vector<double> rho(values_.size());
  std::transform(values_.begin(), values_.end(), rho.begin(),
                 [](const cplx& v) { return std::norm(v); });
  return rho;
}

cplx inner_product(const WaveFunction& a, const WaveFunction& b) {
  if (!(a.grid() == b.grid())) throw ConfigError("inner_product: grid mismatch");
  cplx s{};
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) s += std::conj(va[i]) * vb[i];
  return s * a.grid().dx();
}

double boundary_density_ratio(const WaveFunction& psi) {
  const auto v = psi.values();
  double peak = 0.0;
  for (const auto& z : v) peak = std::max(peak, std::norm(z));
  if (peak == 0.0) return 0.0;
  // The periodic box edge is x_0 = -L; its neighbour x_{n-1} = L - dx.
  const double edge = std::max(std::norm(v.front()), std::norm(v.back()));
  return edge / peak;
}

WaveFunction conjugate(const WaveFunction& psi) {
  WaveFunction out(psi.grid_ptr());
  for (std::size_t i = 0; i < psi.size(); ++i) out[i] = std::conj(psi[i]);
  return out;
}

void write_field_csv(const WaveFunction& psi, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << "x,re,im,density\n";
  const auto xs = psi.grid().x();
  for (std::size_t i = 0; i < psi.size(); ++i) {
    os << format_double(xs[i]) << ',' << format_double(psi[i].real()) << ','
       << format_double(psi[i].imag()) << ',' << format_double(std::norm(psi[i])) << '\n';
  }
  if (!os) throw IoError("write failed for " + path.string());
}

namespace {

constexpr char kMagic[8] = {'B', 'E', 'C', 'F', 'L', 'D', '0', '1'};

template <typename T>
void put_le(std::ostream& os, T value) {
  static_assert(sizeof(T) == 8);
  auto bits = std::bit_cast<std::uint64_t>(value);
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xffu);
  os.write(reinterpret_cast<const char*>(buf), 8);
}

template <typename T>
T get_le(std::istream& is) {
  static_assert(sizeof(T) == 8);
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_field_binary(const WaveFunction& psi, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(kMagic, sizeof(kMagic));
  put_le<std::uint64_t>(os, psi.size());
  put_le<double>(os, psi.grid().half_width());
  for (const auto& v : psi.values()) {
    put_le<double>(os, v.real());
    put_le<double>(os, v.imag());
  }
  if (!os) throw IoError("write failed for " + path.string());
}

WaveFunction read_field_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  char magic[8];
  is.read(magic, 8);
  if (!is || !std::equal(magic, magic + 8, kMagic))
    throw IoError(path.string() + ": not a field dump");
  const auto n = get_le<std::uint64_t>(is);
  const auto half_width = get_le<double>(is);
  if (!is) throw IoError(path.string() + ": truncated header");
  auto grid = make_grid(static_cast<std::size_t>(n), half_width);
  WaveFunction psi(grid);
  for (std::size_t i = 0; i < n; ++i) {
    const double re = get_le<double>(is);
    const double im = get_le<double>(is);
    psi[i] = {re, im};
  }
  if (!is) throw IoError(path.string() + ": truncated data");
  return psi;
}

}  // namespace bec
