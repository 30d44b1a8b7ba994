#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "bec/errors.hpp"
#include "bec/stationary.hpp"

using namespace bec;

namespace {

GridPtr default_grid() {
  static const GridPtr g = make_grid(1024, 20.0);
  return g;
}

}  // namespace

TEST_SUITE("stationary") {

TEST_CASE("ideal gas harmonic states") {
  const auto g = make_grid(256, 10.0);
  const auto field = double_well_field(*g, 0.0);
  const auto s0 = ground_state(g, field, 0.0);
  const auto s1 = first_excited(g, field, 0.0);
  CHECK(s0.chemical_potential == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s1.chemical_potential == doctest::Approx(1.5).epsilon(1e-12));
  const double peak = std::pow(M_PI, -0.25);
  CHECK(s0.wavefunction[g->center_index()].real() == doctest::Approx(peak).epsilon(1e-10));
}

TEST_CASE("interacting harmonic states at g = 10") {
  // reference values: independent solve on the default grid, frozen
  const auto g = default_grid();
  const auto field = double_well_field(*g, 0.0);
  const auto s0 = ground_state(g, field, 10.0);
  const auto s1 = first_excited(g, field, 10.0);
  CHECK(s0.chemical_potential == doctest::Approx(3.107243089426).epsilon(1e-11));
  CHECK(s1.chemical_potential == doctest::Approx(3.863204260925).epsilon(1e-11));
  for (const auto* s : {&s0, &s1}) {
    CHECK(s->residual < 1e-8);
    CHECK(stationary_residual(s->wavefunction, field.values, 10.0, s->chemical_potential) < 1e-8);
    CHECK(parity_defect(s->wavefunction, s->parity) < 1e-9);
    CHECK(s->wavefunction.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
    // the norm-decay estimate is an independent route to mu
    CHECK(std::abs(s->mu_norm_decay - s->chemical_potential) < 1e-6);
    CHECK(std::abs(expectation_mu(s->wavefunction, field.values, 10.0) - s->chemical_potential) < 1e-10);
  }
  // Thomas-Fermi sets the scale: within 3% at this coupling
  CHECK(s0.chemical_potential / thomas_fermi_mu(10.0) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("phase convention") {
  const auto g = default_grid();
  const auto field = double_well_field(*g, 2.0);
  const auto s1 = first_excited(g, field, 5.0);
  const auto x = g->x();
  double best = 0.0;
  std::size_t at = 0;
  for (std::size_t i = 0; i < g->size(); ++i)
    if (std::norm(s1.wavefunction[i]) > best) {
      best = std::norm(s1.wavefunction[i]);
      at = i;
    }
  // odd: the two peaks tie, the positive lobe is on x > 0
  const std::size_t right = x[at] > 0.0 ? at : g->mirror_index(at);
  CHECK(s1.wavefunction[right].real() > 0.0);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(s1.wavefunction[i].imag() == 0.0);
}

TEST_CASE("separated wells are nearly degenerate") {
  const auto g = default_grid();
  const auto field = double_well_field(*g, 4.0);
  const auto s0 = ground_state(g, field, 10.0);
  const auto s1 = first_excited(g, field, 10.0);
  CHECK(s0.chemical_potential == doctest::Approx(2.528825497).epsilon(1e-9));
  CHECK(s1.chemical_potential == doctest::Approx(2.528831746).epsilon(1e-9));
  CHECK(s1.chemical_potential > s0.chemical_potential);
  CHECK(std::abs(inner_product(s0.wavefunction, s1.wavefunction)) < 1e-12);
}

TEST_CASE("lowest even state lies below the odd one across d") {
  const auto g = make_grid(512, 16.0);
  for (double d : {0.5, 1.5, 3.0}) {
    const auto field = double_well_field(*g, d);
    CHECK(ground_state(g, field, 2.0).chemical_potential <
          first_excited(g, field, 2.0).chemical_potential);
  }
}

TEST_CASE("state cache round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "bec_state_cache_test";
  std::filesystem::remove_all(dir);
  const StateCache cache(dir);
  const auto g = make_grid(256, 10.0);
  const auto a = stationary_at(g, 1.0, 3.0, Parity::odd, {}, &cache);
  CHECK(std::filesystem::exists(cache.key_path(*g, 3.0, 1.0, Parity::odd)));
  const auto b = stationary_at(g, 1.0, 3.0, Parity::odd, {}, &cache);
  CHECK(b.chemical_potential == a.chemical_potential);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(b.wavefunction[i] == a.wavefunction[i]);
  CHECK_FALSE(cache.load(g, 3.0, 1.0, Parity::even, {}).has_value());
  std::filesystem::remove_all(dir);
}

TEST_CASE("unconfined states are rejected") {
  const auto g = make_grid(64, 2.0);
  const auto field = double_well_field(*g, 0.0);
  CHECK_THROWS_AS(ground_state(g, field, 50.0), NumericalError);
}

}
