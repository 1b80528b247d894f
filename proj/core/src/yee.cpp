#include "oven/yee.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#if defined(__SSE__)
#include <xmmintrin.h>
#endif

#include <fmt/format.h>

#include "oven/constants.hpp"
#include "oven/error.hpp"

namespace oven {

using constants::c0;
using constants::eps0;
using constants::mu0;

double stable_timestep(const YeeGrid& grid, double courant) {
  if (!(courant > 0 && courant <= 0.99))
    throw InvalidArgument("Courant factor must lie in (0, 0.99]");
  const double inv = 1.0 / (grid.dx * grid.dx) + 1.0 / (grid.dy * grid.dy) +
                     1.0 / (grid.dz * grid.dz);
  return courant / (c0 * std::sqrt(inv));
}

ProbeEdges probe_edges(const Probe& probe, const YeeGrid& grid) {
  ProbeEdges p;
  p.i = std::clamp(static_cast<int>(std::lround(probe.x / grid.dx)), 1, grid.nx - 1);
  p.j = std::clamp(static_cast<int>(std::lround(probe.y / grid.dy)), 1, grid.ny - 1);
  p.k_begin = 0;
  p.k_end = std::clamp(static_cast<int>(std::lround(probe.length / grid.dz)), 1, grid.nz);
  return p;
}

namespace {

// Denormal arithmetic is ~100x slower and appears in the decaying tails of
// single-precision runs. MXCSR is per thread, so each worker sets it.
inline void flush_denormals() {
#if defined(__SSE__)
  _mm_setcsr(_mm_getcsr() | 0x8040);
#endif
}

// Mean of the cell property over the in-range cells (ia, jb, kc) listed.
struct EdgeAverage {
  double eps = 0;
  double sigma = 0;
  int cells = 0;
};

template <class F>
EdgeAverage around(const YeeGrid& g, const CellMedium& med, F&& for_cells) {
  EdgeAverage avg;
  for_cells([&](int i, int j, int k) {
    if (i < 0 || j < 0 || k < 0 || i >= g.nx || j >= g.ny || k >= g.nz) return;
    const std::size_t c = g.index(i, j, k);
    avg.eps += med.eps_r[c];
    avg.sigma += med.sigma[c];
    ++avg.cells;
  });
  return avg;
}

}  // namespace

template <class Real>
YeeSolver<Real>::YeeSolver(const YeeGrid& grid, const CellMedium& medium,
                           const YeeOptions& opts)
    : grid_(grid), opts_(opts) {
  if (medium.eps_r.size() != grid.cells() || medium.sigma.size() != grid.cells())
    throw InvalidArgument("medium size does not match the grid");
  for (std::size_t c = 0; c < grid.cells(); ++c)
    if (!(medium.eps_r[c] >= 1.0) || !(medium.sigma[c] >= 0.0))
      throw InvalidArgument("medium needs eps_r >= 1 and sigma >= 0 in every cell");
  if (opts.open_end && opts.absorber_cells < 4)
    throw InvalidArgument("absorber needs at least 4 cells");
  if (opts.open_end && !(opts.absorber_reflection > 0 && opts.absorber_reflection < 1))
    throw InvalidArgument("absorber reflection must lie in (0, 1)");

  const int nx = grid.nx, ny = grid.ny, nz = grid.nz;
  const int n_abs = opts.open_end ? opts.absorber_cells : 0;
  nzt_ = nz + n_abs;
  ext_ = grid;
  ext_.nz = nzt_;
  state_.dt = stable_timestep(grid, opts.courant);
  const double dt = state_.dt;

  // Cubic conductivity ramp over the absorber, in units of cells past the face.
  const double eta0 = std::sqrt(mu0 / eps0);
  const double sig_max =
      n_abs > 0 ? -4.0 * std::log(opts.absorber_reflection) / (2.0 * eta0 * n_abs * grid.dz) : 0.0;
  auto ramp = [&](double depth) {
    return depth <= 0 ? 0.0 : sig_max * std::pow(std::min(depth, double(n_abs)) / n_abs, 3);
  };

  medium_.eps_r.assign(ext_.cells(), 1.0);
  medium_.sigma.assign(ext_.cells(), 0.0);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < nzt_; ++k) {
        const std::size_t c = ext_.index(i, j, k);
        if (k < nz) {
          medium_.eps_r[c] = medium.eps_r[grid.index(i, j, k)];
          medium_.sigma[c] = medium.sigma[grid.index(i, j, k)];
        } else {
          medium_.sigma[c] = ramp(k - nz + 0.5);
        }
      }

  // Matched magnetic loss: sigma* / mu0 = sigma / eps0 in air.
  auto h_coeffs = [&](double sigma, Real& ha, Real& hb) {
    const double loss = sigma * dt / (2.0 * eps0);
    ha = static_cast<Real>((1.0 - loss) / (1.0 + loss));
    hb = static_cast<Real>(1.0 / (1.0 + loss));
  };
  ha_half_.resize(nzt_);
  hb_half_.resize(nzt_);
  ha_node_.resize(nzt_ + 1);
  hb_node_.resize(nzt_ + 1);
  for (int k = 0; k < nzt_; ++k) h_coeffs(ramp(k - nz + 0.5), ha_half_[k], hb_half_[k]);
  for (int k = 0; k <= nzt_; ++k) h_coeffs(ramp(k - nz), ha_node_[k], hb_node_[k]);

  state_.ex = Array3<Real>(nx, ny + 1, nzt_ + 1);
  state_.ey = Array3<Real>(nx + 1, ny, nzt_ + 1);
  state_.ez = Array3<Real>(nx + 1, ny + 1, nzt_);
  state_.hx = Array3<Real>(nx + 1, ny, nzt_);
  state_.hy = Array3<Real>(nx, ny + 1, nzt_);
  state_.hz = Array3<Real>(nx, ny, nzt_ + 1);

  cax_ = Array3<Real>(nx, ny + 1, nzt_ + 1);
  cbx_ = cax_;
  gx_ = cax_;
  cay_ = Array3<Real>(nx + 1, ny, nzt_ + 1);
  cby_ = cay_;
  gy_ = cay_;
  caz_ = Array3<Real>(nx + 1, ny + 1, nzt_);
  cbz_ = caz_;
  gz_ = caz_;

  const double vol = grid.cell_volume();
  // Update coefficients see the absorber; the dissipation weights only the
  // physical cells.
  auto coeffs = [&](const EdgeAverage& a, const EdgeAverage& phys, Real& ca, Real& cb, Real& g) {
    const double eps = eps0 * a.eps / a.cells;
    const double sig = a.sigma / a.cells;
    const double loss = sig * dt / (2.0 * eps);
    ca = static_cast<Real>((1.0 - loss) / (1.0 + loss));
    cb = static_cast<Real>(dt / eps / (1.0 + loss));
    // sigma_edge V_edge equals the sum over adjacent cells of sigma_c V_c / 4.
    g = static_cast<Real>(phys.sigma * vol / 4.0);
  };

  for (int i = 0; i < nx; ++i)
    for (int j = 0; j <= ny; ++j)
      for (int k = 0; k <= nzt_; ++k) {
        auto cells = [&](auto&& f) {
          f(i, j - 1, k - 1); f(i, j, k - 1); f(i, j - 1, k); f(i, j, k);
        };
        coeffs(around(ext_, medium_, cells), around(grid, medium, cells),
               cax_(i, j, k), cbx_(i, j, k), gx_(i, j, k));
      }
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k <= nzt_; ++k) {
        auto cells = [&](auto&& f) {
          f(i - 1, j, k - 1); f(i, j, k - 1); f(i - 1, j, k); f(i, j, k);
        };
        coeffs(around(ext_, medium_, cells), around(grid, medium, cells),
               cay_(i, j, k), cby_(i, j, k), gy_(i, j, k));
      }
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= ny; ++j)
      for (int k = 0; k < nzt_; ++k) {
        auto cells = [&](auto&& f) {
          f(i - 1, j - 1, k); f(i, j - 1, k); f(i - 1, j, k); f(i, j, k);
        };
        coeffs(around(ext_, medium_, cells), around(grid, medium, cells),
               caz_(i, j, k), cbz_(i, j, k), gz_(i, j, k));
      }

  partial_.assign(static_cast<std::size_t>(nx + 1), 0.0);
}

template <class Real>
void YeeSolver<Real>::set_probe(const ProbeEdges& probe) {
  if (probe.i < 1 || probe.i >= grid_.nx || probe.j < 1 || probe.j >= grid_.ny ||
      probe.k_begin < 0 || probe.k_end > grid_.nz || probe.k_begin >= probe.k_end)
    throw InvalidArgument("probe edges must be interior Ez edges");
  probe_ = probe;
  has_probe_ = true;
}

// Reductions go through partial_[i] (one slot per i-slab) and are summed
// serially afterwards, so results do not depend on the thread count.
template <class Real>
void YeeSolver<Real>::update_h() {
  auto& s = state_;
  const int nx = grid_.nx, ny = grid_.ny, nz = nzt_;
  const Real chx = static_cast<Real>(s.dt / (mu0 * grid_.dx));
  const Real chy = static_cast<Real>(s.dt / (mu0 * grid_.dy));
  const Real chz = static_cast<Real>(s.dt / (mu0 * grid_.dz));
  const bool energy = opts_.track_energy;
  const Real* ha = ha_half_.data();
  const Real* hb = hb_half_.data();
  const Real* na = ha_node_.data();
  const Real* nb = hb_node_.data();
  double* part = partial_.data();

#pragma omp parallel for schedule(static)
  for (int i = 0; i <= nx; ++i) {
    flush_denormals();
    double acc = 0.0;
    for (int j = 0; j < ny; ++j) {
      Real* __restrict h = s.hx.row(i, j);
      const Real* ez0 = s.ez.row(i, j);
      const Real* ez1 = s.ez.row(i, j + 1);
      const Real* ey0 = s.ey.row(i, j);
      for (int k = 0; k < nz; ++k) {
        const Real old = h[k];
        h[k] = ha[k] * old - hb[k] * (chy * (ez1[k] - ez0[k]) - chz * (ey0[k + 1] - ey0[k]));
        if (energy) acc += static_cast<double>(old) * h[k];
      }
    }
    if (i < nx) {
      for (int j = 0; j <= ny; ++j) {
        Real* __restrict h = s.hy.row(i, j);
        const Real* ex0 = s.ex.row(i, j);
        const Real* ez0 = s.ez.row(i, j);
        const Real* ez1 = s.ez.row(i + 1, j);
        for (int k = 0; k < nz; ++k) {
          const Real old = h[k];
          h[k] = ha[k] * old - hb[k] * (chz * (ex0[k + 1] - ex0[k]) - chx * (ez1[k] - ez0[k]));
          if (energy) acc += static_cast<double>(old) * h[k];
        }
      }
      for (int j = 0; j < ny; ++j) {
        Real* __restrict h = s.hz.row(i, j);
        const Real* ey0 = s.ey.row(i, j);
        const Real* ey1 = s.ey.row(i + 1, j);
        const Real* ex0 = s.ex.row(i, j);
        const Real* ex1 = s.ex.row(i, j + 1);
        for (int k = 0; k <= nz; ++k) {
          const Real old = h[k];
          h[k] = na[k] * old - nb[k] * (chx * (ey1[k] - ey0[k]) - chy * (ex1[k] - ex0[k]));
          // Hz on the z-boundary planes carries half a dual cell.
          if (energy) acc += ((k == 0 || k == nz) ? 0.5 : 1.0) * static_cast<double>(old) * h[k];
        }
      }
    }
    part[i] = acc;
  }
  if (energy) {
    const double vol = grid_.cell_volume();
    double h_energy = 0.0;
    for (int i = 0; i <= nx; ++i) h_energy += part[i];
    h_energy *= 0.5 * mu0 * vol;

    double e_energy = 0.0;
    // eps_edge V_edge = sum of eps_c V_c / 4 over adjacent cells.
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j <= ny; ++j)
        for (int k = 0; k <= nz; ++k) {
          double e = 0.0;
          for (int dj = -1; dj <= 0; ++dj)
            for (int dk = -1; dk <= 0; ++dk) {
              const int cj = j + dj, ck = k + dk;
              if (cj < 0 || ck < 0 || cj >= ny || ck >= nz) continue;
              e += medium_.eps_r[ext_.index(i, cj, ck)];
            }
          const double v = s.ex(i, j, k);
          e_energy += e * v * v;
        }
    for (int i = 0; i <= nx; ++i)
      for (int j = 0; j < ny; ++j)
        for (int k = 0; k <= nz; ++k) {
          double e = 0.0;
          for (int di = -1; di <= 0; ++di)
            for (int dk = -1; dk <= 0; ++dk) {
              const int ci = i + di, ck = k + dk;
              if (ci < 0 || ck < 0 || ci >= nx || ck >= nz) continue;
              e += medium_.eps_r[ext_.index(ci, j, ck)];
            }
          const double v = s.ey(i, j, k);
          e_energy += e * v * v;
        }
    for (int i = 0; i <= nx; ++i)
      for (int j = 0; j <= ny; ++j)
        for (int k = 0; k < nz; ++k) {
          double e = 0.0;
          for (int di = -1; di <= 0; ++di)
            for (int dj = -1; dj <= 0; ++dj) {
              const int ci = i + di, cj = j + dj;
              if (ci < 0 || cj < 0 || ci >= nx || cj >= ny) continue;
              e += medium_.eps_r[ext_.index(ci, cj, k)];
            }
          const double v = s.ez(i, j, k);
          e_energy += e * v * v;
        }
    e_energy *= 0.5 * eps0 * vol / 4.0;
    energy_ = e_energy + h_energy;
  }
}

template <class Real>
void YeeSolver<Real>::update_e() {
  auto& s = state_;
  const int nx = grid_.nx, ny = grid_.ny, nz = nzt_;
  const Real rdx = static_cast<Real>(1.0 / grid_.dx);
  const Real rdy = static_cast<Real>(1.0 / grid_.dy);
  const Real rdz = static_cast<Real>(1.0 / grid_.dz);
  const bool loss = opts_.track_dissipation;
  double* part = partial_.data();

#pragma omp parallel for schedule(static)
  for (int i = 0; i <= nx; ++i) {
    double acc = 0.0;
    if (i < nx) {
      for (int j = 1; j < ny; ++j) {
        Real* __restrict e = s.ex.row(i, j);
        const Real* ca = cax_.row(i, j);
        const Real* cb = cbx_.row(i, j);
        const Real* hz0 = s.hz.row(i, j - 1);
        const Real* hz1 = s.hz.row(i, j);
        const Real* hy0 = s.hy.row(i, j);
        for (int k = 1; k < nz; ++k)
          e[k] = ca[k] * e[k] +
                 cb[k] * (rdy * (hz1[k] - hz0[k]) - rdz * (hy0[k] - hy0[k - 1]));
        if (loss) {
          const Real* g = gx_.row(i, j);
          double a = 0.0;
          for (int k = 1; k < nz; ++k) a += static_cast<double>(g[k] * e[k] * e[k]);
          acc += a;
        }
      }
    }
    if (i > 0 && i < nx) {
      for (int j = 0; j < ny; ++j) {
        Real* __restrict e = s.ey.row(i, j);
        const Real* ca = cay_.row(i, j);
        const Real* cb = cby_.row(i, j);
        const Real* hx0 = s.hx.row(i, j);
        const Real* hz0 = s.hz.row(i - 1, j);
        const Real* hz1 = s.hz.row(i, j);
        for (int k = 1; k < nz; ++k)
          e[k] = ca[k] * e[k] +
                 cb[k] * (rdz * (hx0[k] - hx0[k - 1]) - rdx * (hz1[k] - hz0[k]));
        if (loss) {
          const Real* g = gy_.row(i, j);
          double a = 0.0;
          for (int k = 1; k < nz; ++k) a += static_cast<double>(g[k] * e[k] * e[k]);
          acc += a;
        }
      }
      for (int j = 1; j < ny; ++j) {
        Real* __restrict e = s.ez.row(i, j);
        const Real* ca = caz_.row(i, j);
        const Real* cb = cbz_.row(i, j);
        const Real* hy0 = s.hy.row(i - 1, j);
        const Real* hy1 = s.hy.row(i, j);
        const Real* hx0 = s.hx.row(i, j - 1);
        const Real* hx1 = s.hx.row(i, j);
        for (int k = 0; k < nz; ++k)
          e[k] = ca[k] * e[k] +
                 cb[k] * (rdx * (hy1[k] - hy0[k]) - rdy * (hx1[k] - hx0[k]));
        if (loss) {
          const Real* g = gz_.row(i, j);
          double a = 0.0;
          for (int k = 0; k < nz; ++k) a += static_cast<double>(g[k] * e[k] * e[k]);
          acc += a;
        }
      }
    }
    part[i] = acc;
  }
  if (loss) {
    double sum = 0.0;
    for (int i = 0; i <= nx; ++i) sum += part[i];
    dissipation_ = sum;
  }
}

template <class Real>
void YeeSolver<Real>::step(double probe_current) {
  auto& s = state_;
  const bool flux = opts_.open_end && opts_.track_dissipation;
  if (flux) save_flux_planes();
  update_h();
  flux_ = flux ? plane_flux() : 0.0;

  // Probe edge values at step n for the input-power estimate.
  std::vector<Real> before;
  if (has_probe_) {
    before.reserve(probe_.k_end - probe_.k_begin);
    for (int k = probe_.k_begin; k < probe_.k_end; ++k)
      before.push_back(s.ez(probe_.i, probe_.j, k));
  }

  update_e();

  input_power_ = 0.0;
  if (has_probe_) {
    const double vol = grid_.cell_volume();
    double p_in = 0.0, loss_fix = 0.0;
    for (int k = probe_.k_begin; k < probe_.k_end; ++k) {
      Real& e = s.ez(probe_.i, probe_.j, k);
      const Real pre = e;
      e = pre - cbz_(probe_.i, probe_.j, k) * static_cast<Real>(probe_current);
      const double mid = 0.5 * (static_cast<double>(before[k - probe_.k_begin]) + e);
      p_in -= probe_current * mid * vol;
      const double g = gz_(probe_.i, probe_.j, k);
      loss_fix += g * (static_cast<double>(e) * e - static_cast<double>(pre) * pre);
    }
    input_power_ = p_in;
    if (opts_.track_dissipation) dissipation_ += loss_fix;
  }

  s.time += s.dt;
  ++s.steps;
  if (s.steps % 128 == 0) check_finite();
}

template <class Real>
void YeeSolver<Real>::save_flux_planes() {
  const auto& s = state_;
  const int nx = grid_.nx, ny = grid_.ny, kp = grid_.nz;
  h_prev_.clear();
  for (int i = 0; i < nx; ++i)
    for (int j = 1; j < ny; ++j) {
      h_prev_.push_back(s.hy(i, j, kp - 1));
      h_prev_.push_back(s.hy(i, j, kp));
    }
  for (int i = 1; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      h_prev_.push_back(s.hx(i, j, kp - 1));
      h_prev_.push_back(s.hx(i, j, kp));
    }
}

// S_z = Ex Hy - Ey Hx on the face plane k = nz, H averaged over the two
// neighbouring planes and over H^{n-1/2}, H^{n+1/2}.
template <class Real>
double YeeSolver<Real>::plane_flux() const {
  const auto& s = state_;
  const int nx = grid_.nx, ny = grid_.ny, kp = grid_.nz;
  double flux = 0.0;
  std::size_t p = 0;
  for (int i = 0; i < nx; ++i)
    for (int j = 1; j < ny; ++j, p += 2) {
      const double hy = 0.25 * (static_cast<double>(s.hy(i, j, kp - 1)) + s.hy(i, j, kp) +
                                h_prev_[p] + h_prev_[p + 1]);
      flux += static_cast<double>(s.ex(i, j, kp)) * hy;
    }
  for (int i = 1; i < nx; ++i)
    for (int j = 0; j < ny; ++j, p += 2) {
      const double hx = 0.25 * (static_cast<double>(s.hx(i, j, kp - 1)) + s.hx(i, j, kp) +
                                h_prev_[p] + h_prev_[p + 1]);
      flux -= static_cast<double>(s.ey(i, j, kp)) * hx;
    }
  return flux * grid_.dx * grid_.dy;
}

template <class Real>
void YeeSolver<Real>::check_finite() const {
  const auto scan = [](const std::vector<Real>& v) {
    for (const Real x : v)
      if (!(std::abs(x) <= Real(1e30))) return false;
    return true;
  };
  const auto& s = state_;
  if (!(scan(s.ex.flat()) && scan(s.ey.flat()) && scan(s.ez.flat()) &&
        scan(s.hx.flat()) && scan(s.hy.flat()) && scan(s.hz.flat())))
    throw NumericalBlowup(fmt::format(
        "field magnitude exceeded 1e30 after {} steps (t = {:.6g} s)", s.steps, s.time));
}

template class YeeSolver<float>;
template class YeeSolver<double>;

}  // namespace oven
