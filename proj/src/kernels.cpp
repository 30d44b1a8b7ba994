#include "bec/kernels.hpp"

#include <omp.h>

#include <atomic>
#include <cmath>

namespace bec::kernels {

namespace {

std::atomic<std::size_t> g_threshold{512};

bool go_parallel(std::size_t n) {
  return n >= g_threshold.load(std::memory_order_relaxed) && !omp_in_parallel();
}

// Per-element bodies shared by both backends.
inline void phase_at(cplx& z, double v, double g, double tau) {
  const double theta = tau * (v + g * std::norm(z));
  z *= cplx(std::cos(theta), -std::sin(theta));
}

inline void decay_at(cplx& z, double v, double g, double tau) {
  z *= std::exp(-tau * (v + g * std::norm(z)));
}

inline double double_well_at(double x, double d) {
  // d == 0 is the harmonic limit; the quotient form is 0/0 at x = d = 0.
  if (d == 0.0) return 0.5 * x * x;
  const double x2 = x * x;
  const double d2 = d * d;
  const double num = x2 - d2;
  return 0.5 * num * num / (x2 + d2);
}

inline void imprint_at(cplx& z, double x, const cplx& full, const cplx& half) {
  if (x > 0.0)
    z *= full;
  else if (x == 0.0)
    z *= half;
}

}  // namespace

std::size_t parallel_threshold() noexcept { return g_threshold.load(); }
void set_parallel_threshold(std::size_t n) noexcept { g_threshold.store(n); }

namespace serial {

void nonlinear_phase(std::span<cplx> psi, std::span<const double> v,
                     std::span<const double> extra, double g, double tau) {
  const std::size_t n = psi.size();
  if (extra.empty()) {
    for (std::size_t i = 0; i < n; ++i) phase_at(psi[i], v[i], g, tau);
  } else {
    for (std::size_t i = 0; i < n; ++i) phase_at(psi[i], v[i] + extra[i], g, tau);
  }
}

void nonlinear_decay(std::span<cplx> psi, std::span<const double> v, double g, double tau) {
  for (std::size_t i = 0; i < psi.size(); ++i) decay_at(psi[i], v[i], g, tau);
}

void multiply(std::span<cplx> psi, std::span<const cplx> factor) {
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= factor[i];
}

void multiply(std::span<cplx> psi, std::span<const double> factor) {
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= factor[i];
}

void double_well(std::span<double> out, std::span<const double> x, double d) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = double_well_at(x[i], d);
}

void imprint(std::span<cplx> psi, std::span<const double> x, double theta) {
  const cplx full = std::polar(1.0, theta);
  const cplx half = std::polar(1.0, 0.5 * theta);
  for (std::size_t i = 0; i < psi.size(); ++i) imprint_at(psi[i], x[i], full, half);
}

void average(std::span<double> out, std::span<const double> a, std::span<const double> b) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (a[i] + b[i]);
}

}  // namespace serial

namespace parallel {

void nonlinear_phase(std::span<cplx> psi, std::span<const double> v,
                     std::span<const double> extra, double g, double tau) {
  const auto n = static_cast<std::ptrdiff_t>(psi.size());
  if (extra.empty()) {
#pragma omp parallel for schedule(static) if (go_parallel(psi.size()))
    for (std::ptrdiff_t i = 0; i < n; ++i) phase_at(psi[i], v[i], g, tau);
  } else {
#pragma omp parallel for schedule(static) if (go_parallel(psi.size()))
    for (std::ptrdiff_t i = 0; i < n; ++i) phase_at(psi[i], v[i] + extra[i], g, tau);
  }
}

void nonlinear_decay(std::span<cplx> psi, std::span<const double> v, double g, double tau) {
  const auto n = static_cast<std::ptrdiff_t>(psi.size());
#pragma omp parallel for schedule(static) if (go_parallel(psi.size()))
  for (std::ptrdiff_t i = 0; i < n; ++i) decay_at(psi[i], v[i], g, tau);
}

void multiply(std::span<cplx> psi, std::span<const cplx> factor) {
  const auto n = static_cast<std::ptrdiff_t>(psi.size());
#pragma omp parallel for schedule(static) if (go_parallel(psi.size()))
  for (std::ptrdiff_t i = 0; i < n; ++i) psi[i] *= factor[i];
}

void multiply(std::span<cplx> psi, std::span<const double> factor) {
  const auto n = static_cast<std::ptrdiff_t>(psi.size());
#pragma omp parallel for schedule(static) if (go_parallel(psi.size()))
  for (std::ptrdiff_t i = 0; i < n; ++i) psi[i] *= factor[i];
}

void double_well(std::span<double> out, std::span<const double> x, double d) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (go_parallel(out.size()))
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = double_well_at(x[i], d);
}

void imprint(std::span<cplx> psi, std::span<const double> x, double theta) {
  const cplx full = std::polar(1.0, theta);
  const cplx half = std::polar(1.0, 0.5 * theta);
  const auto n = static_cast<std::ptrdiff_t>(psi.size());
#pragma omp parallel for schedule(static) if (go_parallel(psi.size()))
  for (std::ptrdiff_t i = 0; i < n; ++i) imprint_at(psi[i], x[i], full, half);
}

void average(std::span<double> out, std::span<const double> a, std::span<const double> b) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (go_parallel(out.size()))
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = 0.5 * (a[i] + b[i]);
}

}  // namespace parallel

#define BEC_DISPATCH(name, ...)              \
  if (b == Backend::serial)                  \
    serial::name(__VA_ARGS__);               \
  else                                       \
    parallel::name(__VA_ARGS__)

void nonlinear_phase(Backend b, std::span<cplx> psi, std::span<const double> v,
                     std::span<const double> extra, double g, double tau) {
  BEC_DISPATCH(nonlinear_phase, psi, v, extra, g, tau);
}
void nonlinear_decay(Backend b, std::span<cplx> psi, std::span<const double> v, double g,
                     double tau) {
  BEC_DISPATCH(nonlinear_decay, psi, v, g, tau);
}
void multiply(Backend b, std::span<cplx> psi, std::span<const cplx> factor) {
  BEC_DISPATCH(multiply, psi, factor);
}
void multiply(Backend b, std::span<cplx> psi, std::span<const double> factor) {
  BEC_DISPATCH(multiply, psi, factor);
}
void double_well(Backend b, std::span<double> out, std::span<const double> x, double d) {
  BEC_DISPATCH(double_well, out, x, d);
}
void imprint(Backend b, std::span<cplx> psi, std::span<const double> x, double theta) {
  BEC_DISPATCH(imprint, psi, x, theta);
}
void average(Backend b, std::span<double> out, std::span<const double> a,
             std::span<const double> b_in) {
  BEC_DISPATCH(average, out, a, b_in);
}

#undef BEC_DISPATCH

}  // namespace bec::kernels
