#include <doctest.h>

#include <cmath>

#include "bec/errors.hpp"
#include "bec/two_mode.hpp"

using namespace bec;

namespace {

// smooth made-up coefficients; only the structure of the equations matters
ModeTable synthetic_table(double g, std::size_t points = 33) {
  std::vector<ModeData> samples;
  const double d_max = 4.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double d = d_max * static_cast<double>(i) / static_cast<double>(points - 1);
    const double split = std::exp(-d * d / 2);
    samples.push_back({d, 1.0 - 0.2 * d, 1.0 - 0.2 * d + split, 0.3 - 0.05 * d, 0.1 + 0.02 * d,
                       0.25 - 0.04 * d});
  }
  return ModeTable(samples, d_max, g);
}

}  // namespace

TEST_SUITE("two_mode") {

TEST_CASE("ideal gas overlaps in the harmonic trap") {
  const auto g = make_grid(512, 12.0);
  const auto m = mode_data(g, 0.0, 0.0);
  const double r = std::sqrt(2 * M_PI);
  CHECK(m.mu0 == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(m.mu1 == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(m.o00 == doctest::Approx(1.0 / r).epsilon(1e-10));
  CHECK(m.o11 == doctest::Approx(3.0 / (4.0 * r)).epsilon(1e-10));
  CHECK(m.o01 == doctest::Approx(1.0 / (2.0 * r)).epsilon(1e-10));
}

TEST_CASE("separated wells make the overlaps equal") {
  const auto g = make_grid(1024, 20.0);
  const auto m = mode_data(g, 4.0, 10.0);
  CHECK(m.mu0 == doctest::Approx(2.5288254970071).epsilon(1e-10));
  CHECK(m.mu1 == doctest::Approx(2.5288317456049).epsilon(1e-10));
  CHECK(std::abs(m.o00 - m.o01) < 1e-4 * m.o00);
  CHECK(std::abs(m.o11 - m.o01) < 1e-4 * m.o00);
}

TEST_CASE("imprint is unitary") {
  const TwoModeState in{cplx(0.6, 0.1), cplx(-0.3, 0.2), 0.0};
  for (double theta : {0.0, 0.4, 1.7, M_PI, 5.9}) {
    const auto out = imprint_amplitudes(theta, in);
    CHECK(out.norm_squared() == doctest::Approx(in.norm_squared()).epsilon(1e-15));
  }
  const auto pi = imprint_amplitudes(M_PI, TwoModeState{});
  CHECK(std::abs(pi.c0) < 1e-15);
  CHECK(std::abs(pi.c1 - cplx(0.0, 1.0)) < 1e-15);
  const auto zero = imprint_amplitudes(0.0, in);
  CHECK(zero.c0 == in.c0);
  CHECK(zero.c1 == in.c1);
}

TEST_CASE("norm is conserved with interactions") {
  const auto table = synthetic_table(10.0);
  for (double theta : {0.5, 2.0, 3.0}) {
    TrapProtocol p;
    p.theta = theta;
    const auto r = integrate_two_mode(TwoModeState{}, p, table, 1e-3, 100);
    CHECK(r.max_norm_drift < 1e-9);
    CHECK(r.p0.size() == 701);
    CHECK(r.p0.values.back() + r.p1.values.back() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("without interactions the imprint alone sets the populations") {
  const auto table = synthetic_table(0.0);
  for (double theta : {0.0, 1.0, 2.5, M_PI}) {
    TrapProtocol p;
    p.theta = theta;
    const auto r = integrate_two_mode(TwoModeState{}, p, table);
    const double c = std::cos(0.5 * theta);
    CHECK(std::norm(r.final_state.c0) == doctest::Approx(c * c).epsilon(1e-10));
    CHECK(r.final_state.time == doctest::Approx(70.0));
  }
}

TEST_CASE("table interpolation reproduces the samples") {
  const auto table = synthetic_table(1.0);
  const auto& s = table.samples();
  for (std::size_t i = 0; i < s.size(); i += 4) {
    const auto m = table.at(s[i].separation);
    CHECK(m.mu1 == doctest::Approx(s[i].mu1).epsilon(1e-12));
    CHECK(m.o01 == doctest::Approx(s[i].o01).epsilon(1e-12));
  }
  CHECK(table.at(10.0).separation == 4.0);
}

TEST_CASE("bad inputs") {
  const auto table = synthetic_table(1.0);
  TrapProtocol p;
  p.a = 3.0;
  CHECK_THROWS_AS(integrate_two_mode(TwoModeState{}, p, table), ConfigError);
  p.a = 2.0;
  CHECK_THROWS_AS(integrate_two_mode(TwoModeState{}, p, table, 0.3), ConfigError);
  CHECK_THROWS_AS(ModeTable(std::vector<ModeData>(3), 1.0, 1.0), ConfigError);
}

}  // TEST_SUITE
