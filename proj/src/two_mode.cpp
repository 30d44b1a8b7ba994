#include "bec/two_mode.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cmath>
#include <exception>
#include <omp.h>

#include "bec/errors.hpp"
#include "bec/format.hpp"
#include "bec/propagator.hpp"

namespace bec {

ModeData mode_data(const StationaryState& even, const StationaryState& odd) {
  const WaveFunction& a = even.wavefunction;
  const WaveFunction& b = odd.wavefunction;
  if (!(a.grid() == b.grid())) throw ConfigError("mode data: grid mismatch");
  ModeData m{even.separation, even.chemical_potential, odd.chemical_potential, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ra = std::norm(a[i]), rb = std::norm(b[i]);
    m.o00 += ra * ra;
    m.o11 += rb * rb;
    m.o01 += ra * rb;
  }
  const double dx = a.grid().dx();
  m.o00 *= dx;
  m.o01 *= dx;
  m.o11 *= dx;
  return m;
}

ModeData mode_data(GridPtr grid, double d, double g, const StationaryOptions& opts,
                   const StateCache* cache) {
  const auto even = stationary_at(grid, d, g, Parity::even, opts, cache);
  const auto odd = stationary_at(grid, d, g, Parity::odd, opts, cache);
  return mode_data(even, odd);
}

struct ModeTable::Splines {
  using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
  Spline mu0, mu1, o00, o01, o11;
};

ModeTable::ModeTable(GridPtr grid, double d_max, double g, std::size_t points,
                     const StationaryOptions& opts, const StateCache* cache)
    : d_max_(d_max), g_(g) {
  if (points < 4) throw ConfigError("mode table: need at least 4 points");
  if (!(d_max > 0.0)) throw ConfigError("mode table: d_max must be > 0");
  samples_.resize(points);
  std::vector<std::exception_ptr> errors(points);
#pragma omp parallel for schedule(dynamic, 1) if (!omp_in_parallel())
  for (std::size_t i = 0; i < points; ++i) {
    try {
      const double d = d_max * static_cast<double>(i) / static_cast<double>(points - 1);
      samples_[i] = mode_data(grid, d, g, opts, cache);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  build_splines();
}

ModeTable::ModeTable(std::vector<ModeData> samples, double d_max, double g)
    : samples_(std::move(samples)), d_max_(d_max), g_(g) {
  if (samples_.size() < 4) throw ConfigError("mode table: need at least 4 points");
  build_splines();
}

ModeTable::~ModeTable() = default;
ModeTable::ModeTable(ModeTable&&) noexcept = default;
ModeTable& ModeTable::operator=(ModeTable&&) noexcept = default;

void ModeTable::build_splines() {
  const double h = d_max_ / static_cast<double>(samples_.size() - 1);
  auto make = [&](double ModeData::*field) {
    std::vector<double> y;
    y.reserve(samples_.size());
    for (const auto& s : samples_) y.push_back(s.*field);
    return Splines::Spline(y.begin(), y.end(), 0.0, h);
  };
  splines_ = std::make_unique<Splines>(Splines{make(&ModeData::mu0), make(&ModeData::mu1),
                                               make(&ModeData::o00), make(&ModeData::o01),
                                               make(&ModeData::o11)});
}

ModeData ModeTable::at(double d) const {
  d = std::clamp(d, 0.0, d_max_);
  const Splines& s = *splines_;
  return {d, s.mu0(d), s.mu1(d), s.o00(d), s.o01(d), s.o11(d)};
}

TwoModeState imprint_amplitudes(double theta, const TwoModeState& in) {
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  const cplx is(0.0, s);
  return {c * in.c0 + is * in.c1, is * in.c0 + c * in.c1, in.time};
}

void two_mode_rhs(const ModeData& m, double g, cplx c0, cplx c1, cplx& dc0, cplx& dc1) {
  const cplx minus_i(0.0, -1.0);
  const cplx h0 = m.mu0 * c0 + g * (2.0 * m.o01 - m.o00) * std::norm(c1) * c0 +
                  g * m.o01 * c1 * c1 * std::conj(c0);
  const cplx h1 = m.mu1 * c1 + g * (2.0 * m.o01 - m.o11) * std::norm(c0) * c1 +
                  g * m.o01 * c0 * c0 * std::conj(c1);
  dc0 = minus_i * h0;
  dc1 = minus_i * h1;
}

TwoModeResult integrate_two_mode(TwoModeState c, const TrapProtocol& protocol,
                                 const ModeTable& table, double dt, std::size_t record_every) {
  protocol.validate();
  if (!(dt > 0.0)) throw ConfigError("two-mode: dt must be > 0");
  if (2.0 * protocol.a > table.d_max() * (1.0 + 1e-12))
    throw ConfigError("two-mode: mode table does not cover the protocol");
  const std::size_t steps = whole_steps(protocol.tau, dt, "operation time");
  const std::size_t imprint = whole_steps(protocol.imprint_time(), dt, "imprint time");
  const double g = table.coupling();
  const double n0 = c.norm_squared();

  TwoModeResult out;
  auto record = [&](const TwoModeState& s) {
    out.p0.push(s.time, std::norm(s.c0));
    out.p1.push(s.time, std::norm(s.c1));
    out.max_norm_drift = std::max(out.max_norm_drift, std::abs(s.norm_squared() - n0));
  };
  record(c);

  auto data_at = [&](double t) { return table.at(separation(t, protocol)); };
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = c.time;
    const ModeData m0 = data_at(t), mh = data_at(t + 0.5 * dt), m1 = data_at(t + dt);
    cplx k0[2], k1[2], k2[2], k3[2];
    two_mode_rhs(m0, g, c.c0, c.c1, k0[0], k0[1]);
    two_mode_rhs(mh, g, c.c0 + 0.5 * dt * k0[0], c.c1 + 0.5 * dt * k0[1], k1[0], k1[1]);
    two_mode_rhs(mh, g, c.c0 + 0.5 * dt * k1[0], c.c1 + 0.5 * dt * k1[1], k2[0], k2[1]);
    two_mode_rhs(m1, g, c.c0 + dt * k2[0], c.c1 + dt * k2[1], k3[0], k3[1]);
    c.c0 += dt / 6.0 * (k0[0] + 2.0 * k1[0] + 2.0 * k2[0] + k3[0]);
    c.c1 += dt / 6.0 * (k0[1] + 2.0 * k1[1] + 2.0 * k2[1] + k3[1]);
    c.time = static_cast<double>(n + 1) * dt;
    if (n + 1 == imprint) c = imprint_amplitudes(protocol.theta, c);
    if ((record_every && (n + 1) % record_every == 0) || n + 1 == steps) record(c);
  }
  out.final_state = c;
  out.max_norm_drift = std::max(out.max_norm_drift, std::abs(c.norm_squared() - n0));
  if (out.max_norm_drift > 1e-9)
    throw NumericalError("two-mode: norm drift " + format_double(out.max_norm_drift) +
                         " exceeds 1e-9; reduce dt");
  return out;
}

}  // namespace bec
