#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace bec::kernels {

using cplx = std::complex<double>;

// Pointwise kernels of the split-step scheme. Every kernel exists twice:
// `serial` is the plain reference loop kept for testing, `parallel` is the
// OpenMP version used in production. Both touch each element independently
// with identical arithmetic, so their results agree bit for bit and runs stay
// reproducible for any thread count. Reductions (norms, overlaps) are not
// kernels here; they stay serial in a fixed order.

enum class Backend { serial, parallel };

namespace serial {

// psi_j *= exp(-i tau (v_j + extra_j + g |psi_j|^2)); `extra` may be empty.
void nonlinear_phase(std::span<cplx> psi, std::span<const double> v,
                     std::span<const double> extra, double g, double tau);
// psi_j *= exp(-tau (v_j + g |psi_j|^2))  (imaginary time)
void nonlinear_decay(std::span<cplx> psi, std::span<const double> v, double g, double tau);
void multiply(std::span<cplx> psi, std::span<const cplx> factor);
void multiply(std::span<cplx> psi, std::span<const double> factor);
void double_well(std::span<double> out, std::span<const double> x, double d);
// psi_j *= e^{i theta} for x_j > 0, e^{i theta/2} at x_j == 0.
void imprint(std::span<cplx> psi, std::span<const double> x, double theta);
// out_j = 0.5 * (a_j + b_j)
void average(std::span<double> out, std::span<const double> a, std::span<const double> b);

}  // namespace serial

namespace parallel {

void nonlinear_phase(std::span<cplx> psi, std::span<const double> v,
                     std::span<const double> extra, double g, double tau);
void nonlinear_decay(std::span<cplx> psi, std::span<const double> v, double g, double tau);
void multiply(std::span<cplx> psi, std::span<const cplx> factor);
void multiply(std::span<cplx> psi, std::span<const double> factor);
void double_well(std::span<double> out, std::span<const double> x, double d);
void imprint(std::span<cplx> psi, std::span<const double> x, double theta);
void average(std::span<double> out, std::span<const double> a, std::span<const double> b);

}  // namespace parallel

/// Arrays shorter than this run serially even in the parallel backend, as
/// does any call made from inside an enclosing parallel region (scans).
std::size_t parallel_threshold() noexcept;
void set_parallel_threshold(std::size_t n) noexcept;

// Backend dispatch.
void nonlinear_phase(Backend b, std::span<cplx> psi, std::span<const double> v,
                     std::span<const double> extra, double g, double tau);
void nonlinear_decay(Backend b, std::span<cplx> psi, std::span<const double> v, double g,
                     double tau);
void multiply(Backend b, std::span<cplx> psi, std::span<const cplx> factor);
void multiply(Backend b, std::span<cplx> psi, std::span<const double> factor);
void double_well(Backend b, std::span<double> out, std::span<const double> x, double d);
void imprint(Backend b, std::span<cplx> psi, std::span<const double> x, double theta);
void average(Backend b, std::span<double> out, std::span<const double> a,
             std::span<const double> b_in);

}  // namespace bec::kernels
