#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "bec/grid.hpp"
#include "bec/potentials.hpp"
#include "bec/stationary.hpp"
#include "bec/time_series.hpp"

namespace bec {

struct TwoModeState {
  cplx c0{1.0, 0.0};
  cplx c1{0.0, 0.0};
  double time = 0.0;

  double norm_squared() const noexcept { return std::norm(c0) + std::norm(c1); }
  /// arg(c1 / c0), the gauge-invariant relative phase.
  double relative_phase() const { return std::arg(c1 * std::conj(c0)); }
};

/// Chemical potentials and the overlaps O_kl = int (phi_k phi_l)^2 dx of the
/// even and odd nonlinear eigenstates at one separation.
struct ModeData {
  double separation = 0.0;
  double mu0 = 0.0;
  double mu1 = 0.0;
  double o00 = 0.0;
  double o01 = 0.0;
  double o11 = 0.0;
};

ModeData mode_data(const StationaryState& even, const StationaryState& odd);
ModeData mode_data(GridPtr grid, double d, double g, const StationaryOptions& opts = {},
                   const StateCache* cache = nullptr);

/// Mode data at evenly spaced separations on [0, d_max] with cubic B-spline
/// interpolation in between.
class ModeTable {
public:
  static constexpr std::size_t kDefaultPoints = 64;

  ModeTable(GridPtr grid, double d_max, double g, std::size_t points = kDefaultPoints,
            const StationaryOptions& opts = {}, const StateCache* cache = nullptr);
  /// Build from precomputed samples at separations i * d_max / (n - 1).
  ModeTable(std::vector<ModeData> samples, double d_max, double g);
  ~ModeTable();
  ModeTable(ModeTable&&) noexcept;
  ModeTable& operator=(ModeTable&&) noexcept;

  ModeData at(double d) const;
  double d_max() const noexcept { return d_max_; }
  double coupling() const noexcept { return g_; }
  const std::vector<ModeData>& samples() const noexcept { return samples_; }

private:
  void build_splines();

  std::vector<ModeData> samples_;
  double d_max_;
  double g_;
  struct Splines;
  std::unique_ptr<Splines> splines_;
};

/// Relative phase theta between the half spaces acting on the
/// symmetric/antisymmetric pair:
///   c0 <- cos(theta/2) c0 + i sin(theta/2) c1
///   c1 <- i sin(theta/2) c0 + cos(theta/2) c1
TwoModeState imprint_amplitudes(double theta, const TwoModeState& in);

/// Right-hand side of the two-mode equations,
///   i dc_k/dt = mu_k c_k + g (2 O01 - O_kk) |c_{1-k}|^2 c_k + g O01 c_{1-k}^2 conj(c_k).
void two_mode_rhs(const ModeData& m, double g, cplx c0, cplx c1, cplx& dc0, cplx& dc1);

struct TwoModeResult {
  TwoModeState final_state;
  TimeSeries p0{"p0"};
  TimeSeries p1{"p1"};
  double max_norm_drift = 0.0;
};

/// Classical RK4 from t = 0 to tau with the imprint at tau/2 (which must be
/// a whole number of steps). Samples every `record_every` steps (0: only
/// the end points). Throws NumericalError when |c0|^2 + |c1|^2 drifts by
/// more than 1e-9.
TwoModeResult integrate_two_mode(TwoModeState c, const TrapProtocol& protocol,
                                 const ModeTable& table, double dt = 1e-3,
                                 std::size_t record_every = 0);

}  // namespace bec
