#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "bec/errors.hpp"
#include "bec/fft.hpp"
#include "bec/grid.hpp"

using namespace bec;

TEST_SUITE("grid") {

TEST_CASE("small grid points and spacing") {
  const auto g = make_grid(8, 4.0);
  CHECK(g->dx() == 1.0);
  const double expect[] = {-4, -3, -2, -1, 0, 1, 2, 3};
  for (std::size_t i = 0; i < 8; ++i) CHECK(g->x()[i] == expect[i]);
  CHECK(g->x()[g->center_index()] == 0.0);
}

TEST_CASE("default grid spacing") {
  CHECK(make_grid(1024, 20.0)->dx() == 0.0390625);
}

TEST_CASE("mirror index reflects x") {
  const auto g = make_grid(64, 5.0);
  for (std::size_t i = 1; i < 64; ++i) CHECK(g->x()[g->mirror_index(i)] == -g->x()[i]);
  CHECK(g->mirror_index(0) == 0);
}

TEST_CASE("wavenumbers") {
  const auto g = make_grid(16, 8.0);
  const auto k = g->wavenumbers();
  const auto k2 = g->k_squared();
  const double dk = 2.0 * M_PI / 16.0;
  CHECK(k[1] == doctest::Approx(dk));
  CHECK(k[15] == doctest::Approx(-dk));
  CHECK(k[8] == 0.0);
  CHECK(k2[8] == doctest::Approx(std::pow(M_PI / g->dx(), 2)));
  double sum = 0.0;
  for (double v : k) sum += v;
  CHECK(sum == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("bad grids are rejected") {
  CHECK_THROWS_AS(make_grid(4, 1.0), ConfigError);
  CHECK_THROWS_AS(make_grid(33, 1.0), ConfigError);
  CHECK_THROWS_AS(make_grid(64, 0.0), ConfigError);
}

TEST_CASE("normalization and inner product") {
  const auto g = make_grid(512, 12.0);
  auto psi = sample(g, [](double x) { return cplx(std::exp(-0.5 * (x - 1) * (x - 1)), 0.3 * x); });
  psi.normalize();
  CHECK(psi.norm_squared() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(inner_product(psi, psi) - 1.0) < 1e-13);
  auto phi = sample(g, [](double x) { return cplx(std::exp(-0.5 * x * x), 0.0); });
  phi.normalize();
  const cplx a = inner_product(psi, phi), b = inner_product(phi, psi);
  CHECK(std::abs(a - std::conj(b)) < 1e-15);

  const auto other = make_grid(256, 12.0);
  WaveFunction w(other);
  CHECK_THROWS_AS(inner_product(psi, w), ConfigError);
}

TEST_CASE("zero field cannot be normalized") {
  WaveFunction psi(make_grid(16, 2.0));
  CHECK_THROWS_AS(psi.normalize(), NumericalError);
}

TEST_CASE("Parseval") {
  const auto g = make_grid(256, 10.0);
  auto psi = sample(g, [](double x) { return cplx(std::exp(-x * x) * std::cos(3 * x), x * std::exp(-x * x)); });
  psi.normalize();
  const Fft fft(g->size());
  CHECK(std::abs(spectral_norm_squared(psi, fft) - psi.norm_squared()) < 1e-12);
}

TEST_CASE("confinement ratio") {
  const auto g = make_grid(256, 10.0);
  auto narrow = sample(g, [](double x) { return cplx(std::exp(-x * x), 0); });
  auto wide = sample(g, [](double x) { return cplx(std::exp(-0.01 * x * x), 0); });
  CHECK(is_confined(narrow));
  CHECK_FALSE(is_confined(wide));
}

TEST_CASE("binary field round trip is exact") {
  const auto g = make_grid(128, 6.0);
  auto psi = sample(g, [](double x) { return cplx(std::sin(x) / 3.0, std::cos(x) * 1e-7); });
  const auto path = std::filesystem::temp_directory_path() / "bec_field_roundtrip.bin";
  write_field_binary(psi, path);
  const WaveFunction back = read_field_binary(path);
  CHECK(back.grid() == psi.grid());
  for (std::size_t i = 0; i < psi.size(); ++i) CHECK(back[i] == psi[i]);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_field_binary(path), IoError);
}

}
