#include <doctest.h>

#include <cmath>

#include "bec/errors.hpp"
#include "bec/observables.hpp"
#include "bec/potentials.hpp"

using namespace bec;

namespace {

WaveFunction gaussian(GridPtr g, double x0, double w) {
  auto psi = sample(g, [&](double x) { return cplx(std::exp(-(x - x0) * (x - x0) / (2 * w * w))); });
  psi.normalize();
  return psi;
}

TimeSeries cosine(double amp, double omega, double t1, double dt, double offset = 0.0) {
  TimeSeries s("c");
  for (double t = 0.0; t <= t1 + 1e-12; t += dt) s.push(t, offset + amp * std::cos(omega * t));
  return s;
}

}  // namespace

TEST_SUITE("observables") {

TEST_CASE("populations of the basis states and superpositions") {
  const auto g = make_grid(512, 12.0);
  const auto field = double_well_field(*g, 2.0);
  const auto s0 = ground_state(g, field, 0.0);
  const auto s1 = first_excited(g, field, 0.0);

  auto p = populations(s0.wavefunction, s0, s1);
  CHECK(p.p0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(p.p1) < 1e-12);

  const double a = 0.6, b = 0.8;
  WaveFunction mix(g);
  for (std::size_t i = 0; i < g->size(); ++i)
    mix[i] = a * s0.wavefunction[i] + cplx(0.0, b) * s1.wavefunction[i];
  p = populations(mix, s0, s1);
  CHECK(std::abs(p.p0 - a * a) < 1e-10);
  CHECK(std::abs(p.p1 - b * b) < 1e-10);
  CHECK(p.pex < 1e-10);
  CHECK(p.p0 + p.p1 + p.pex == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mean position and width") {
  const auto g = make_grid(1024, 20.0);
  const auto psi = gaussian(g, 0.7, 1.3);
  CHECK(mean_position(psi) == doctest::Approx(0.7).epsilon(1e-10));
  CHECK(rms_width(psi) == doctest::Approx(1.3 / std::sqrt(2.0)).epsilon(1e-10));

  const auto odd = sample(g, [](double x) { return cplx(x * std::exp(-x * x / 2)); });
  CHECK(std::abs(mean_position(odd)) < 1e-14);
}

TEST_CASE("energy of the harmonic ground state") {
  const auto g = make_grid(256, 10.0);
  const auto psi = gaussian(g, 0.0, 1.0);
  const auto v = double_well_field(*g, 0.0);
  CHECK(gpe_energy(psi, v.values, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  // interaction energy g/2 int rho^2 = g / (2 sqrt(2 pi))
  CHECK(gpe_energy(psi, v.values, 3.0) ==
        doctest::Approx(0.5 + 3.0 / (2 * std::sqrt(2 * M_PI))).epsilon(1e-12));
}

TEST_CASE("thomas-fermi radius") {
  CHECK(thomas_fermi_radius(10.0) == doctest::Approx(std::sqrt(2 * 3.0411009977866996)));
  CHECK(thomas_fermi_radius(0.0) == 0.0);
}

TEST_CASE("dark soliton position") {
  const auto g = make_grid(1024, 20.0);
  const double x0 = 0.5;
  const auto psi = sample(g, [&](double x) {
    return cplx(std::exp(-x * x / 50.0) * std::tanh(x - x0));
  });
  const auto dip = soliton_position(psi, 4.0);
  REQUIRE(dip);
  CHECK(std::abs(dip->position - x0) <= 0.5 * g->dx());
  CHECK(dip->density < 1e-3 * dip->background);

  // centred search: the same dip is out of reach around a far centre
  CHECK_FALSE(soliton_position(psi, 4.0, std::nullopt, 10.0));
  CHECK(soliton_position(psi, 4.0, std::nullopt, 3.0));

  // a smooth cloud has no dip
  CHECK_FALSE(soliton_position(gaussian(g, 0.0, 2.0), 4.0));
}

TEST_CASE("tracker follows a moving dip and loses a jump") {
  const auto g = make_grid(1024, 20.0);
  auto dark = [&](double x0) {
    return sample(g, [&](double x) { return cplx(std::exp(-x * x / 50.0) * std::tanh(x - x0)); });
  };
  SolitonTracker tracker(4.0, 1.0);
  for (int k = 0; k <= 10; ++k) tracker.observe(0.1 * k, dark(0.05 * k));
  CHECK(tracker.tracked_throughout());
  CHECK(tracker.track().series.values.back() == doctest::Approx(0.5).epsilon(1e-3));

  tracker.observe(1.1, dark(2.0));
  CHECK(tracker.track().lost);
  CHECK(*tracker.track().lost_at == doctest::Approx(1.1));
  tracker.observe(1.2, dark(2.0));
  CHECK(tracker.track().series.size() == 11);
}

TEST_CASE("oscillation amplitude") {
  CHECK(oscillation_amplitude(cosine(0.3, 1.0, 20.0, 0.01)) == doctest::Approx(0.3).epsilon(1e-3));
  CHECK(oscillation_amplitude(cosine(0.0, 1.0, 20.0, 0.1, 2.0)) == 0.0);
  CHECK_THROWS_AS(oscillation_amplitude(cosine(0.3, 1.0, 0.5, 0.1)), NumericalError);
  // fewer than 1.5 periods after the first quarter
  CHECK_THROWS_AS(oscillation_amplitude(cosine(0.3, 1.0, 6.0, 0.01)), NumericalError);
  CHECK_THROWS_AS(oscillation_amplitude(TimeSeries{}), NumericalError);
}

TEST_CASE("sinusoid fit and crossing period") {
  const auto s = cosine(0.25, 1.3, 30.0, 0.05, 0.1);
  const auto fit = fit_sinusoid(s, 0.5, 1.5);
  CHECK(fit.omega == doctest::Approx(1.3).epsilon(1e-9));
  CHECK(fit.amplitude == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(fit.offset == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(fit.rms_residual < 1e-10);
  // the window mean is not the true offset, so crossings alternate unevenly
  CHECK(crossing_period(s) == doctest::Approx(2 * M_PI / 1.3).epsilon(1e-2));
  CHECK_THROWS_AS(crossing_period(cosine(0.3, 1.0, 2.0, 0.1)), NumericalError);
  CHECK_THROWS_AS(fit_sinusoid(s, 1.5, 0.5), ConfigError);
}

}  // TEST_SUITE
