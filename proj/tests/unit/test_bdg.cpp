#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bec/bdg.hpp"
#include "bec/errors.hpp"

using namespace bec;

namespace {

GridPtr default_grid() {
  static const GridPtr g = make_grid(1024, 20.0);
  return g;
}

std::vector<double> positive_frequencies(const BdgSpectrum& s) {
  std::vector<double> out;
  for (const auto& m : s.modes)
    if (!m.goldstone && m.frequency.real() > 0.0) out.push_back(m.frequency.real());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_SUITE("bdg") {

TEST_CASE("ideal gas spectrum is the oscillator ladder") {
  const auto g = default_grid();
  const auto field = double_well_field(*g, 0.0);
  const auto s0 = ground_state(g, field, 0.0);
  const auto spec = bdg_spectrum(s0, field, 0.0);
  const auto w = positive_frequencies(spec);
  REQUIRE(w.size() >= 4);
  for (int n = 1; n <= 4; ++n) CHECK(w[n - 1] == doctest::Approx(n).epsilon(1e-6));
  CHECK(spec.max_growth_rate() < 1e-8);
}

TEST_CASE("interacting ground state: goldstone, kohn and stability") {
  const auto g = default_grid();
  const auto field = double_well_field(*g, 0.0);
  const auto s0 = ground_state(g, field, 10.0);
  const auto spec = bdg_spectrum(s0, field, 10.0);

  const auto* zero = spec.goldstone();
  REQUIRE(zero);
  CHECK(std::abs(zero->frequency) < 1e-5);

  const auto* kohn = spec.lowest();
  REQUIRE(kohn);
  CHECK(kohn->frequency.real() == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(kohn->parity == Parity::odd);
  CHECK(kohn->norm_sign == 1);
  CHECK(kohn->residual < 1e-8);

  const auto w = positive_frequencies(spec);
  REQUIRE(w.size() >= 3);
  // breathing mode near sqrt(3) in the Thomas-Fermi limit
  CHECK(w[1] == doctest::Approx(1.77247).epsilon(1e-4));
  CHECK(spec.max_growth_rate() < 1e-6);
  CHECK(spec.max_pair_defect < 1e-8);
  CHECK(spec.phi_residual < 1e-8);
}

TEST_CASE("positive-norm modes have a negative-norm partner") {
  const auto g = default_grid();
  const auto field = double_well_field(*g, 1.0);
  const auto s0 = ground_state(g, field, 5.0);
  const auto spec = bdg_spectrum(s0, field, 5.0);
  for (const auto& m : spec.modes) {
    if (m.goldstone) continue;
    CHECK(m.norm_sign != 0);
    if (std::abs(m.frequency.imag()) < 1e-9) CHECK((m.frequency.real() > 0) == (m.norm_sign > 0));
  }
}

TEST_CASE("the antisymmetric state of a split cloud is unstable") {
  const auto g = default_grid();
  // frozen from the dense solve; cross-checked against the seeded GPE growth
  CHECK(odd_state_growth_rate(g, 1.5, 10.0) == doctest::Approx(0.676485).epsilon(2e-5));
  CHECK(odd_state_growth_rate(g, 0.0, 10.0) < kInstabilityThreshold);
}

TEST_CASE("critical separation brackets the onset") {
  const auto g = default_grid();
  const auto c = critical_separation(g, 10.0, 0.0, 2.0, 0.01);
  CHECK(c.d_crit > 0.0);
  CHECK(c.d_crit < 1.5);
  CHECK(odd_state_growth_rate(g, c.d_crit + 0.02, 10.0) > kInstabilityThreshold);
  CHECK(odd_state_growth_rate(g, std::max(0.0, c.d_crit - 0.02), 10.0) <= kInstabilityThreshold);
}

TEST_CASE("window checks") {
  const auto g = default_grid();
  const auto field = double_well_field(*g, 0.0);
  const auto s0 = ground_state(g, field, 1.0);
  BdgOptions o;
  o.stride = 0;
  CHECK_THROWS_AS(bdg_spectrum(s0, field, 1.0, o), ConfigError);
  o.stride = 1;
  o.window = 0.1;
  CHECK_THROWS_AS(bdg_spectrum(s0, field, 1.0, o), ConfigError);
  CHECK_THROWS_AS(critical_separation(g, 10.0, 2.0, 1.0, 0.01), ConfigError);
}

}  // TEST_SUITE
