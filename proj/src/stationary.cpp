#include "bec/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bec/errors.hpp"
#include "bec/fft.hpp"
#include "bec/format.hpp"
#include "bec/propagator.hpp"

namespace bec {

const char* to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

namespace {

using RealVec = std::vector<double>;

double sign_of(Parity p) { return p == Parity::even ? 1.0 : -1.0; }

void symmetrize(std::span<double> f, const Grid& grid, Parity p) {
  const double s = sign_of(p);
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i <= n / 2; ++i) {
    const std::size_t j = grid.mirror_index(i);
    const double a = 0.5 * (f[i] + s * f[j]);
    f[i] = a;
    f[j] = s * a;
  }
}

void symmetrize(WaveFunction& psi, Parity p) {
  const Grid& grid = psi.grid();
  const double s = sign_of(p);
  for (std::size_t i = 0; i <= grid.size() / 2; ++i) {
    const std::size_t j = grid.mirror_index(i);
    const cplx a = 0.5 * (psi[i] + s * psi[j]);
    psi[i] = a;
    psi[j] = s * a;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Real-valued GPE operator pieces on one grid.
class RealOperator {
public:
  RealOperator(const Grid& grid, std::span<const double> v, double g)
      : grid_(grid), v_(v), g_(g), fft_(grid.size()), scratch_(grid.size()) {}

  void kinetic(std::span<const double> in, std::span<double> out) {
    for (std::size_t i = 0; i < in.size(); ++i) scratch_[i] = in[i];
    fft_.forward(scratch_);
    const auto k2 = grid_.k_squared();
    const double scale = 0.5 / static_cast<double>(grid_.size());
    for (std::size_t i = 0; i < scratch_.size(); ++i) scratch_[i] *= k2[i] * scale;
    fft_.backward(scratch_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = scratch_[i].real();
  }

  // out = (T + V + g phi^2) phi
  void hamiltonian(std::span<const double> phi, std::span<double> out) {
    kinetic(phi, out);
    for (std::size_t i = 0; i < phi.size(); ++i)
      out[i] += (v_[i] + g_ * phi[i] * phi[i]) * phi[i];
  }

  const Grid& grid() const { return grid_; }
  std::span<const double> v() const { return v_; }
  double g() const { return g_; }

private:
  const Grid& grid_;
  std::span<const double> v_;
  double g_;
  Fft fft_;
  std::vector<cplx> scratch_;
};

struct ResidualInfo {
  double mu;
  double norm;
};

ResidualInfo residual(RealOperator& op, std::span<const double> phi, std::span<double> r) {
  const double dx = op.grid().dx();
  op.hamiltonian(phi, r);
  const double mu = dot(phi, r) * dx;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= mu * phi[i];
  return {mu, std::sqrt(dot(r, r) * dx)};
}

// Unpreconditioned MINRES (Paige & Saunders) for a symmetric operator.
template <typename Apply>
int minres(Apply&& apply, std::span<const double> b, std::span<double> x, double rtol,
           int max_iter) {
  const std::size_t n = b.size();
  std::fill(x.begin(), x.end(), 0.0);
  RealVec r1(b.begin(), b.end()), r2(r1), y(r1), v(n), w(n, 0.0), w1(n), w2(n, 0.0);
  const double beta1 = std::sqrt(dot(b, b));
  if (beta1 == 0.0) return 0;
  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  for (int k = 1; k <= max_iter; ++k) {
    const double s = 1.0 / beta;
    for (std::size_t i = 0; i < n; ++i) v[i] = s * y[i];
    apply(std::span<const double>(v), std::span<double>(y));
    if (k >= 2)
      for (std::size_t i = 0; i < n; ++i) y[i] -= (beta / oldb) * r1[i];
    const double alfa = dot(v, y);
    for (std::size_t i = 0; i < n; ++i) y[i] -= (alfa / beta) * r2[i];
    r1.swap(r2);
    r2 = y;
    oldb = beta;
    beta = std::sqrt(dot(y, y));
    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), 1e-300);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar *= sn;
    w1.swap(w2);
    w2.swap(w);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma;
      x[i] += phi * w[i];
    }
    if (phibar < rtol * beta1 || beta == 0.0) return k;
  }
  return max_iter;
}

void fix_phase(WaveFunction& psi) {
  // Remove the global phase, then make the rightmost density peak positive.
  const Grid& grid = psi.grid();
  std::size_t peak = grid.center_index();
  double best = -1.0;
  for (std::size_t i = grid.center_index(); i < grid.size(); ++i) {
    const double rho = std::norm(psi[i]);
    if (rho > best * (1.0 + 1e-9)) {
      best = rho;
      peak = i;
    }
  }
  const cplx ref = psi[peak];
  const cplx rot = std::abs(ref) > 0.0 ? std::conj(ref) / std::abs(ref) : cplx(1.0);
  for (auto& z : psi.values()) z = cplx((z * rot).real(), 0.0);
}

// -ln||e^{-dt H} phi|| / dt carries an O(dt) bias from the density decaying
// inside the step; two probe steps remove it by Richardson extrapolation.
double norm_decay_estimate(const WaveFunction& phi, std::span<const double> v, double g) {
  constexpr double kProbe = 1e-4;
  double est[2];
  for (int k = 0; k < 2; ++k) {
    SplitStepPropagator prop(phi.grid_ptr(), g,
                             StepperConfig{kProbe / (1 + k), TimeMode::imaginary, true});
    WaveFunction probe = phi;
    prop.step(probe, v);
    est[k] = prop.norm_decay_mu();
  }
  return 2.0 * est[1] - est[0];
}

}  // namespace

WaveFunction parity_seed(GridPtr grid, double d, Parity parity) {
  if (!std::isfinite(d)) d = 0.0;
  auto psi = sample(grid, [d, parity](double x) {
    const double e = std::exp(-0.5 * (x - d) * (x - d)) + std::exp(-0.5 * (x + d) * (x + d));
    return cplx(parity == Parity::even ? e : x * e, 0.0);
  });
  psi.normalize();
  return psi;
}

double expectation_mu(const WaveFunction& phi, std::span<const double> v, double g) {
  const Grid& grid = phi.grid();
  Fft fft(grid.size());
  std::vector<cplx> tphi(grid.size());
  apply_kinetic(grid, fft, phi.values(), tphi);
  cplx s{};
  for (std::size_t i = 0; i < grid.size(); ++i)
    s += std::conj(phi[i]) * (tphi[i] + (v[i] + g * std::norm(phi[i])) * phi[i]);
  return (s * grid.dx()).real() / phi.norm_squared();
}

double stationary_residual(const WaveFunction& phi, std::span<const double> v, double g,
                           double mu) {
  const Grid& grid = phi.grid();
  Fft fft(grid.size());
  std::vector<cplx> tphi(grid.size());
  apply_kinetic(grid, fft, phi.values(), tphi);
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    s += std::norm(tphi[i] + (v[i] + g * std::norm(phi[i]) - mu) * phi[i]);
  return std::sqrt(s * grid.dx());
}

double parity_defect(const WaveFunction& phi, Parity parity) {
  const Grid& grid = phi.grid();
  const double s = sign_of(parity);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    worst = std::max(worst, std::abs(phi[i] - s * phi[grid.mirror_index(i)]));
  return worst;
}

StationaryState solve_stationary(GridPtr grid, const PotentialField& field, double g,
                                 Parity parity, const StationaryOptions& opts,
                                 const WaveFunction* seed) {
  if (field.values.size() != grid->size())
    throw ConfigError("stationary: potential does not match grid");
  const std::span<const double> v = field.values;
  const double dx = grid->dx();

  // 1. Imaginary-time relaxation with parity projection.
  WaveFunction psi = seed ? *seed : parity_seed(grid, field.separation, parity);
  if (!(psi.grid() == *grid)) throw ConfigError("stationary: seed grid mismatch");
  symmetrize(psi, parity);
  psi.normalize();

  StepperConfig imag{opts.dt, TimeMode::imaginary, true};
  SplitStepPropagator prop(grid, g, imag);
  RealOperator op(*grid, v, g);
  RealVec phi(grid->size()), r(grid->size());
  auto load_real = [&] {
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = psi[i].real();
  };

  constexpr std::size_t kCheckEvery = 200;
  constexpr double kNewtonStart = 1e-4;
  double prev_res = std::numeric_limits<double>::infinity();
  for (std::size_t step = 0; step < opts.max_relax_steps; ++step) {
    prop.step(psi, v);
    symmetrize(psi, parity);
    if ((step + 1) % kCheckEvery != 0) continue;
    psi.normalize();
    load_real();
    const double res = residual(op, phi, r).norm;
    if (res < kNewtonStart || res < opts.tol) break;
    // Splitting bias: the relaxation stalls at an O(dt^2) distance.
    if (res < 1e-2 && res > 0.97 * prev_res) break;
    prev_res = res;
  }
  psi.normalize();
  fix_phase(psi);
  load_real();

  // 2. Newton polish on the real field, restricted to the parity sector and
  //    to the tangent space of the unit sphere.
  auto project = [&](std::span<double> f) {
    const double c = dot(phi, f) * dx;
    for (std::size_t i = 0; i < f.size(); ++i) f[i] -= c * phi[i];
  };
  auto info = residual(op, phi, r);
  RealVec delta(phi.size()), rhs(phi.size()), trial(phi.size()), kx(phi.size()), tmp(phi.size());
  for (int it = 0; it < opts.max_newton && info.norm >= opts.tol; ++it) {
    const double mu = info.mu;
    auto apply = [&](std::span<const double> x, std::span<double> y) {
      tmp.assign(x.begin(), x.end());
      project(tmp);
      op.kinetic(tmp, y);
      for (std::size_t i = 0; i < y.size(); ++i)
        y[i] += (v[i] + 3.0 * g * phi[i] * phi[i] - mu) * tmp[i];
      project(y);
      symmetrize(y, *grid, parity);
    };
    for (std::size_t i = 0; i < r.size(); ++i) rhs[i] = -r[i];
    symmetrize(rhs, *grid, parity);
    project(rhs);
    minres(apply, rhs, delta, 1e-9, 20000);
    project(delta);
    symmetrize(delta, *grid, parity);

    double step = 1.0;
    bool accepted = false;
    for (int k = 0; k < 8; ++k, step *= 0.5) {
      for (std::size_t i = 0; i < phi.size(); ++i) trial[i] = phi[i] + step * delta[i];
      const double nrm = std::sqrt(dot(trial, trial) * dx);
      for (auto& t : trial) t /= nrm;
      auto trial_info = residual(op, trial, kx);
      if (trial_info.norm < info.norm) {
        phi.swap(trial);
        r.swap(kx);
        info = trial_info;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!(info.norm < opts.tol))
    throw NumericalError(std::string("stationary: ") + to_string(parity) +
                         " state did not converge (residual " + format_double(info.norm) +
                         ", tol " + format_double(opts.tol) + ")");

  for (std::size_t i = 0; i < phi.size(); ++i) psi[i] = cplx(phi[i], 0.0);
  fix_phase(psi);

  StationaryState out{psi, 0.0, parity, field.separation, g, 0.0, 0.0};
  out.chemical_potential = expectation_mu(psi, v, g);
  out.residual = stationary_residual(psi, v, g, out.chemical_potential);
  const double defect = parity_defect(psi, parity);
  if (!(defect < 1e-9))
    throw NumericalError(std::string("stationary: parity violation ") + format_double(defect));
  if (!is_confined(psi))
    throw NumericalError("stationary: state reaches the box edge (edge/peak density " +
                         format_double(boundary_density_ratio(psi)) + "); enlarge half_width");

  out.mu_norm_decay = norm_decay_estimate(psi, v, g);
  return out;
}

StationaryState ground_state(GridPtr grid, const PotentialField& v, double g,
                             const StationaryOptions& opts) {
  return solve_stationary(std::move(grid), v, g, Parity::even, opts);
}

StationaryState first_excited(GridPtr grid, const PotentialField& v, double g,
                              const StationaryOptions& opts) {
  return solve_stationary(std::move(grid), v, g, Parity::odd, opts);
}

StateCache::StateCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("state cache: cannot create " + dir_.string() + ": " + ec.message());
}

std::filesystem::path StateCache::key_path(const Grid& grid, double g, double d,
                                           Parity parity) const {
  return dir_ / ("state_g" + format_double(g) + "_d" + format_double(d) + "_" +
                 to_string(parity) + "_n" + std::to_string(grid.size()) + "_L" +
                 format_double(grid.half_width()) + ".bin");
}

std::optional<StationaryState> StateCache::load(GridPtr grid, double g, double d, Parity parity,
                                                const StationaryOptions& opts) const {
  const auto path = key_path(*grid, g, d, parity);
  if (!std::filesystem::exists(path)) return std::nullopt;
  WaveFunction raw = read_field_binary(path);
  if (!(raw.grid() == *grid)) return std::nullopt;
  WaveFunction psi(grid, std::vector<cplx>(raw.values().begin(), raw.values().end()));
  const auto field = double_well_field(*grid, d);
  const double mu = expectation_mu(psi, field.values, g);
  const double res = stationary_residual(psi, field.values, g, mu);
  if (!(res < opts.tol) || !(parity_defect(psi, parity) < 1e-9)) return std::nullopt;
  return StationaryState{psi, mu, parity, d, g, res, norm_decay_estimate(psi, field.values, g)};
}

void StateCache::store(const StationaryState& s) const {
  write_field_binary(s.wavefunction,
                     key_path(s.wavefunction.grid(), s.coupling, s.separation, s.parity));
}

StationaryState stationary_at(GridPtr grid, double d, double g, Parity parity,
                              const StationaryOptions& opts, const StateCache* cache) {
  if (cache)
    if (auto hit = cache->load(grid, g, d, parity, opts)) return *hit;
  auto s = solve_stationary(grid, double_well_field(*grid, d), g, parity, opts);
  if (cache) cache->store(s);
  return s;
}

}  // namespace bec
