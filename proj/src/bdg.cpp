#include "bec/bdg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "bec/errors.hpp"
#include "bec/format.hpp"

namespace bec {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Window {
  std::vector<std::size_t> grid_index;
  std::vector<double> x;
  double dx = 0.0;
  std::size_t half = 0;  // points on each side of x = 0
  std::size_t size() const { return x.size(); }
};

Window make_window(const Grid& grid, double width, std::size_t stride) {
  if (stride == 0) throw ConfigError("bdg: stride must be >= 1");
  if (!(width > 0.0)) throw ConfigError("bdg: window must be > 0");
  Window w;
  w.dx = grid.dx() * static_cast<double>(stride);
  const std::size_t c = grid.center_index();
  while (c + (w.half + 1) * stride < grid.size() &&
         static_cast<double>(w.half + 1) * w.dx < width)
    ++w.half;
  if (w.half < 8) throw ConfigError("bdg: window too small for the grid");
  for (std::size_t k = 0; k < 2 * w.half + 1; ++k) {
    const std::size_t i = c - w.half * stride + k * stride;
    w.grid_index.push_back(i);
    w.x.push_back(grid.x()[i]);
  }
  return w;
}

// -1/2 d^2/dx^2 (fourth-order stencil, zero outside the window) + diag(v).
MatrixXd fd_hamiltonian(const Window& w, const std::vector<double>& v) {
  const auto n = static_cast<Eigen::Index>(w.size());
  const double s = -0.5 / (12.0 * w.dx * w.dx);
  const double stencil[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};
  MatrixXd h = MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = -2; k <= 2; ++k) {
      const Eigen::Index j = i + k;
      if (j >= 0 && j < n) h(i, j) += s * stencil[k + 2];
    }
    h(i, i) += v[static_cast<std::size_t>(i)];
  }
  return h;
}

// Expansion from the x >= 0 half (x > 0 for odd fields) to the window.
struct Sector {
  Parity parity;
  MatrixXd expand;                   // n x m
  std::vector<Eigen::Index> rows;    // window rows kept in reduced form
};

Sector make_sector(const Window& w, Parity p) {
  const auto c = static_cast<Eigen::Index>(w.half);
  const Eigen::Index first = p == Parity::even ? 0 : 1;
  const Eigen::Index m = c + 1 - first;
  Sector s{p, MatrixXd::Zero(static_cast<Eigen::Index>(w.size()), m), {}};
  const double sign = p == Parity::even ? 1.0 : -1.0;
  for (Eigen::Index k = first; k <= c; ++k) {
    const Eigen::Index col = k - first;
    s.expand(c + k, col) = 1.0;
    if (k > 0) s.expand(c - k, col) = sign;
    s.rows.push_back(c + k);
  }
  return s;
}

MatrixXd reduce(const MatrixXd& a, const Sector& s) {
  const MatrixXd ae = a * s.expand;
  MatrixXd out(static_cast<Eigen::Index>(s.rows.size()), ae.cols());
  for (std::size_t r = 0; r < s.rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = ae.row(s.rows[r]);
  return out;
}

VectorXd restrict_rows(const VectorXd& f, const Sector& s) {
  VectorXd out(static_cast<Eigen::Index>(s.rows.size()));
  for (std::size_t r = 0; r < s.rows.size(); ++r) out[static_cast<Eigen::Index>(r)] = f[s.rows[r]];
  return out;
}

struct Condensate {
  VectorXd phi;
  double mu;
  double residual;
};

// Newton iteration for (H + g phi^2 - mu) phi = 0, sum phi^2 dx = 1 within
// the parity sector of the state, starting from the spectral solution.
Condensate reconverge(const MatrixXd& h, const Window& w, const Sector& s, VectorXd phi,
                      double mu, double g) {
  const double dx = w.dx;
  phi /= std::sqrt(phi.squaredNorm() * dx);
  const auto m = static_cast<Eigen::Index>(s.rows.size());
  auto residual_of = [&](const VectorXd& f, double mu_) {
    VectorXd r = h * f + (g * f.array().square() * f.array()).matrix() - mu_ * f;
    return r;
  };
  VectorXd r = residual_of(phi, mu);
  double res = std::sqrt(r.squaredNorm() * dx);
  for (int it = 0; it < 30 && res > 1e-13; ++it) {
    MatrixXd jfull = h;
    jfull.diagonal() += (3.0 * g * phi.array().square()).matrix() - VectorXd::Constant(h.rows(), mu);
    MatrixXd jac = MatrixXd::Zero(m + 1, m + 1);
    jac.topLeftCorner(m, m) = reduce(jfull, s);
    jac.topRightCorner(m, 1) = -restrict_rows(phi, s);
    jac.bottomLeftCorner(1, m) = 2.0 * dx * (s.expand.transpose() * phi).transpose();
    VectorXd rhs(m + 1);
    rhs.head(m) = -restrict_rows(r, s);
    rhs[m] = -(phi.squaredNorm() * dx - 1.0);
    const VectorXd step = jac.partialPivLu().solve(rhs);
    const VectorXd phi_new = phi + s.expand * step.head(m);
    const double mu_new = mu + step[m];
    const VectorXd r_new = residual_of(phi_new, mu_new);
    const double res_new = std::sqrt(r_new.squaredNorm() * dx);
    if (!(res_new < res)) break;
    phi = phi_new;
    mu = mu_new;
    r = r_new;
    res = res_new;
  }
  return {phi, mu, res};
}

struct RawMode {
  cplx omega;
  Eigen::VectorXcd vec;  // (u, v) in reduced coordinates
  const Sector* sector;
  double pair_defect;
};

void solve_sector(const MatrixXd& a, const MatrixXd& b, const Sector& s,
                  std::vector<RawMode>& out, double& max_defect) {
  const MatrixXd ar = reduce(a, s), br = reduce(b, s);
  const Eigen::Index m = ar.rows();
  MatrixXd l(2 * m, 2 * m);
  l << ar, br, -br, -ar;
  Eigen::EigenSolver<MatrixXd> es(l, true);
  if (es.info() != Eigen::Success) throw NumericalError("bdg: eigensolver failed");
  const Eigen::VectorXcd w = es.eigenvalues();
  const auto n = w.size();

  // The spectrum is closed under omega -> -conj(omega) and, the matrix being
  // real, under omega -> conj(omega). One representative per orbit: Re > 0,
  // or Im >= 0 on the imaginary axis.
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx target = -std::conj(w[i]);
    double defect = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) defect = std::min(defect, std::abs(w[j] - target));
    max_defect = std::max(max_defect, defect);
    const double tol = 1e-9 * std::max(1.0, std::abs(w[i]));
    const bool keep = w[i].real() > tol || (std::abs(w[i].real()) <= tol && w[i].imag() >= -tol);
    if (keep) out.push_back({w[i], es.eigenvectors().col(i), &s, defect});
  }
}

double integral(const std::vector<cplx>& f, double dx) {
  double s = 0.0;
  for (const auto& z : f) s += std::norm(z);
  return s * dx;
}

}  // namespace

const BdgMode* BdgSpectrum::goldstone() const {
  for (const auto& m : modes)
    if (m.goldstone) return &m;
  return nullptr;
}

const BdgMode* BdgSpectrum::lowest() const {
  for (const auto& m : modes)
    if (!m.goldstone) return &m;
  return nullptr;
}

double BdgSpectrum::max_growth_rate() const {
  double best = 0.0;
  for (const auto& m : modes)
    if (!m.goldstone) best = std::max(best, m.frequency.imag());
  return best;
}

std::vector<cplx> BdgSpectrum::embed(const std::vector<cplx>& f, const Grid& grid,
                                     std::size_t stride) const {
  if (stride != 1) throw ConfigError("bdg: embedding needs the full-resolution window");
  std::vector<cplx> out(grid.size(), cplx{});
  const std::size_t half = (x.size() - 1) / 2;
  const std::size_t c = grid.center_index();
  for (std::size_t k = 0; k < x.size(); ++k) out[c - half + k] = f[k];
  return out;
}

BdgSpectrum bdg_spectrum(const StationaryState& state, const PotentialField& field, double g,
                         const BdgOptions& opts) {
  const Grid& grid = state.wavefunction.grid();
  if (field.values.size() != grid.size()) throw ConfigError("bdg: potential does not match grid");
  const Window w = make_window(grid, opts.window, opts.stride);
  const auto n = static_cast<Eigen::Index>(w.size());

  std::vector<double> vwin(w.size());
  VectorXd phi0(n);
  for (std::size_t k = 0; k < w.size(); ++k) {
    vwin[k] = field.values[w.grid_index[k]];
    phi0[static_cast<Eigen::Index>(k)] = state.wavefunction[w.grid_index[k]].real();
  }
  const MatrixXd h = fd_hamiltonian(w, vwin);
  const Sector even = make_sector(w, Parity::even), odd = make_sector(w, Parity::odd);
  const Sector& own = state.parity == Parity::even ? even : odd;
  const Condensate cond = reconverge(h, w, own, phi0, state.chemical_potential, g);
  if (!(cond.residual < 1e-8))
    throw NumericalError("bdg: condensate did not re-converge on the window (residual " +
                         format_double(cond.residual) + ")");

  BdgSpectrum out;
  out.x = w.x;
  out.dx = w.dx;
  out.mu = cond.mu;
  out.phi.assign(cond.phi.data(), cond.phi.data() + n);
  out.phi_residual = cond.residual;

  const VectorXd rho = cond.phi.array().square();
  MatrixXd a = h;
  a.diagonal() += (2.0 * g * rho).matrix() - VectorXd::Constant(n, cond.mu);
  const MatrixXd b = (g * rho).asDiagonal();

  std::vector<RawMode> raw;
  solve_sector(a, b, even, raw, out.max_pair_defect);
  solve_sector(a, b, odd, raw, out.max_pair_defect);

  // Goldstone: smallest |omega| in the condensate's own sector.
  std::optional<std::size_t> gold;
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (raw[i].sector == &own && std::abs(raw[i].omega) < 1e-4 &&
        (!gold || std::abs(raw[i].omega) < std::abs(raw[*gold].omega)))
      gold = i;

  // With B = 0 the zero mode is doubly degenerate; keep one copy.
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (gold && (i == *gold || (raw[i].sector == &own && std::abs(raw[i].omega) < 1e-4)))
      continue;
    order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return std::abs(raw[i].omega) < std::abs(raw[j].omega);
  });
  if (order.size() > opts.n_modes) order.resize(opts.n_modes);
  if (gold) order.insert(order.begin(), *gold);

  auto residual = [&](const BdgMode& m) {
    Eigen::VectorXcd u = Eigen::Map<const Eigen::VectorXcd>(m.u.data(), n);
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(m.v.data(), n);
    const Eigen::VectorXcd r1 = a * u + b * v - m.frequency * u;
    const Eigen::VectorXcd r2 = -b * u - a * v - m.frequency * v;
    return std::sqrt((r1.squaredNorm() + r2.squaredNorm()) /
                     (u.squaredNorm() + v.squaredNorm()));
  };

  for (const std::size_t i : order) {
    const RawMode& r = raw[i];
    BdgMode mode;
    mode.frequency = r.omega;
    mode.parity = r.sector->parity;
    const Eigen::Index m = r.sector->expand.cols();
    const Eigen::VectorXcd u = r.sector->expand.cast<cplx>() * r.vec.head(m);
    const Eigen::VectorXcd v = r.sector->expand.cast<cplx>() * r.vec.tail(m);
    mode.u.assign(u.data(), u.data() + n);
    mode.v.assign(v.data(), v.data() + n);

    if (gold && i == *gold) {
      mode.goldstone = true;
      for (Eigen::Index k = 0; k < n; ++k) {
        mode.u[static_cast<std::size_t>(k)] = cond.phi[k];
        mode.v[static_cast<std::size_t>(k)] = -cond.phi[k];
      }
      mode.norm_sign = 0;
    } else {
      const double nu = integral(mode.u, w.dx), nv = integral(mode.v, w.dx);
      const double ratio = (nu - nv) / (nu + nv);
      mode.norm_sign = std::abs(ratio) < 1e-6 ? 0 : (ratio > 0.0 ? 1 : -1);
      // Fix the phase on the largest |u| entry, then the scale.
      std::size_t peak = 0;
      for (std::size_t k = 1; k < mode.u.size(); ++k)
        if (std::abs(mode.u[k]) > std::abs(mode.u[peak])) peak = k;
      cplx scale = std::abs(mode.u[peak]) > 0.0 ? std::conj(mode.u[peak]) / std::abs(mode.u[peak])
                                                : cplx(1.0);
      if (mode.norm_sign == 0)
        scale /= std::abs(mode.u[peak]);
      else
        scale /= std::sqrt(std::abs(nu - nv));
      for (auto& z : mode.u) z *= scale;
      for (auto& z : mode.v) z *= scale;
    }
    mode.residual = residual(mode);
    out.modes.push_back(std::move(mode));
  }

  if (opts.check_refinement && opts.stride == 1 && out.lowest()) {
    BdgOptions coarse = opts;
    coarse.stride = 2;
    coarse.check_refinement = false;
    const BdgSpectrum c = bdg_spectrum(state, field, g, coarse);
    if (const BdgMode* lc = c.lowest()) {
      const double fine = std::abs(out.lowest()->frequency);
      const double change = std::abs(std::abs(lc->frequency) - fine) / std::max(fine, 1e-300);
      out.refinement_change = change;
      out.discretization_sensitive = change > 0.01;
    }
  }
  return out;
}

double odd_state_growth_rate(GridPtr grid, double d, double g, const BdgOptions& opts,
                             const StationaryOptions& sopts) {
  const auto field = double_well_field(*grid, d);
  const auto odd = solve_stationary(grid, field, g, Parity::odd, sopts);
  BdgOptions o = opts;
  o.check_refinement = false;
  return bdg_spectrum(odd, field, g, o).max_growth_rate();
}

CriticalSeparation critical_separation(GridPtr grid, double g, double d_lo, double d_hi,
                                       double tol, const BdgOptions& opts,
                                       const StationaryOptions& sopts) {
  if (!(d_hi > d_lo) || !(tol > 0.0)) throw ConfigError("critical separation: bad range");
  CriticalSeparation out;
  const auto steps = static_cast<std::size_t>(std::ceil((d_hi - d_lo) / 0.25));
  double below = d_lo, above = 0.0;
  bool found = false;
  for (std::size_t i = 0; i <= steps && !found; ++i) {
    const double d = std::min(d_hi, d_lo + (d_hi - d_lo) * static_cast<double>(i) /
                                              static_cast<double>(steps));
    const double rate = odd_state_growth_rate(grid, d, g, opts, sopts);
    out.scan.emplace_back(d, rate);
    if (rate > kInstabilityThreshold) {
      if (i == 0) {
        out.d_crit = d;
        return out;
      }
      above = d;
      found = true;
    } else {
      below = d;
    }
  }
  if (!found)
    throw NumericalError("critical separation: no onset of Im omega > 1e-3 in [" +
                         format_double(d_lo) + ", " + format_double(d_hi) + "] at g = " +
                         format_double(g));
  while (above - below > tol) {
    const double mid = 0.5 * (below + above);
    const double rate = odd_state_growth_rate(grid, mid, g, opts, sopts);
    out.scan.emplace_back(mid, rate);
    (rate > kInstabilityThreshold ? above : below) = mid;
  }
  out.d_crit = 0.5 * (below + above);
  return out;
}

}  // namespace bec
