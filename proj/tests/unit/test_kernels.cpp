#include <doctest.h>

#include <random>
#include <vector>

#include "bec/kernels.hpp"

using namespace bec;
using kernels::cplx;

namespace {

struct Data {
  std::vector<cplx> psi;
  std::vector<double> v, extra, x;
  std::vector<cplx> cfactor;
  std::vector<double> rfactor;
};

Data random_field(std::size_t n) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> nd;
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    d.psi.emplace_back(nd(rng), nd(rng));
    d.v.push_back(nd(rng));
    d.extra.push_back(nd(rng));
    d.cfactor.emplace_back(nd(rng), nd(rng));
    d.rfactor.push_back(nd(rng));
    d.x.push_back(-5.0 + 10.0 * static_cast<double>(i) / static_cast<double>(n));
  }
  d.x[n / 2] = 0.0;
  return d;
}

struct ThresholdGuard {
  std::size_t saved = kernels::parallel_threshold();
  explicit ThresholdGuard(std::size_t n) { kernels::set_parallel_threshold(n); }
  ~ThresholdGuard() { kernels::set_parallel_threshold(saved); }
};

template <typename T>
bool same_bits(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("parallel kernels agree bit for bit with the serial reference") {
  ThresholdGuard force(0);
  const std::size_t n = 4099;
  const Data d = random_field(n);

  SUBCASE("nonlinear phase") {
    auto a = d.psi, b = d.psi;
    kernels::serial::nonlinear_phase(a, d.v, d.extra, 7.5, 1e-3);
    kernels::parallel::nonlinear_phase(b, d.v, d.extra, 7.5, 1e-3);
    CHECK(same_bits(a, b));
    kernels::serial::nonlinear_phase(a, d.v, {}, 7.5, 1e-3);
    kernels::parallel::nonlinear_phase(b, d.v, {}, 7.5, 1e-3);
    CHECK(same_bits(a, b));
  }
  SUBCASE("nonlinear decay") {
    auto a = d.psi, b = d.psi;
    kernels::serial::nonlinear_decay(a, d.v, 3.0, 5e-4);
    kernels::parallel::nonlinear_decay(b, d.v, 3.0, 5e-4);
    CHECK(same_bits(a, b));
  }
  SUBCASE("multiply") {
    auto a = d.psi, b = d.psi;
    kernels::serial::multiply(a, d.cfactor);
    kernels::parallel::multiply(b, d.cfactor);
    CHECK(same_bits(a, b));
    kernels::serial::multiply(a, d.rfactor);
    kernels::parallel::multiply(b, d.rfactor);
    CHECK(same_bits(a, b));
  }
  SUBCASE("double well") {
    std::vector<double> a(n), b(n);
    kernels::serial::double_well(a, d.x, 1.7);
    kernels::parallel::double_well(b, d.x, 1.7);
    CHECK(same_bits(a, b));
  }
  SUBCASE("imprint") {
    auto a = d.psi, b = d.psi;
    kernels::serial::imprint(a, d.x, 2.2);
    kernels::parallel::imprint(b, d.x, 2.2);
    CHECK(same_bits(a, b));
  }
  SUBCASE("average") {
    std::vector<double> a(n), b(n);
    kernels::serial::average(a, d.v, d.extra);
    kernels::parallel::average(b, d.v, d.extra);
    CHECK(same_bits(a, b));
  }
}

TEST_CASE("backend dispatch reaches both implementations") {
  ThresholdGuard force(0);
  const Data d = random_field(1000);
  auto a = d.psi, b = d.psi;
  kernels::nonlinear_phase(kernels::Backend::serial, a, d.v, {}, 2.0, 0.01);
  kernels::nonlinear_phase(kernels::Backend::parallel, b, d.v, {}, 2.0, 0.01);
  CHECK(same_bits(a, b));
}

TEST_CASE("imprint phases") {
  std::vector<cplx> psi(3, cplx(1.0, 0.0));
  const std::vector<double> x{-1.0, 0.0, 1.0};
  kernels::serial::imprint(psi, x, M_PI);
  CHECK(psi[0] == cplx(1.0, 0.0));
  CHECK(std::abs(psi[1] - cplx(0.0, 1.0)) < 1e-15);
  CHECK(std::abs(psi[2] - cplx(-1.0, 0.0)) < 1e-15);
}

TEST_CASE("nonlinear phase is a pure phase") {
  const Data d = random_field(256);
  auto a = d.psi;
  kernels::serial::nonlinear_phase(a, d.v, d.extra, 10.0, 0.1);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::abs(a[i]) == doctest::Approx(std::abs(d.psi[i])).epsilon(1e-15));
}

}
