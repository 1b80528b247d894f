#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "oven/error.hpp"
#include "oven/xmap.hpp"

using namespace oven;

namespace {

YeeGrid em_grid(int nx, int ny, int nz, double h = 1e-3) {
  YeeGrid g;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.dx = g.dy = g.dz = h;
  return g;
}

std::vector<std::uint8_t> full_mask(const YeeGrid& g) { return std::vector<std::uint8_t>(g.cells(), 1); }

ThermalGrid thermal(Vec3 lo, Vec3 hi, int nx, int ny, int nz) {
  ThermalGrid t;
  t.region = {lo, hi};
  t.nx = nx;
  t.ny = ny;
  t.nz = nz;
  return t;
}

double weight_between(const Mapping& m, std::size_t t, std::size_t em) {
  for (std::size_t n = m.offsets[t]; n < m.offsets[t + 1]; ++n)
    if (m.entries[n].cell == em) return m.entries[n].weight;
  return 0.0;
}

}  // namespace

TEST(BuildMapping, Identity) {
  const YeeGrid g = em_grid(3, 4, 5);
  const auto m = build_mapping(g, thermal({0, 0, 0}, {3e-3, 4e-3, 5e-3}, 3, 4, 5), full_mask(g));
  for (std::size_t t = 0; t < g.cells(); ++t) {
    ASSERT_EQ(m.offsets[t + 1] - m.offsets[t], 1u);
    EXPECT_EQ(m.entries[m.offsets[t]].cell, t);
    EXPECT_NEAR(m.entries[m.offsets[t]].weight, 1e-9, 1e-21);
  }
  EXPECT_LT(m.max_weight_error, 1e-12);
}

TEST(BuildMapping, NestedCoarse) {
  const YeeGrid g = em_grid(4, 4, 6);
  const auto m = build_mapping(g, thermal({0, 0, 0}, {4e-3, 4e-3, 6e-3}, 2, 2, 3), full_mask(g));
  for (std::size_t t = 0; t < 12; ++t) {
    ASSERT_EQ(m.offsets[t + 1] - m.offsets[t], 8u);
    for (std::size_t n = m.offsets[t]; n < m.offsets[t + 1]; ++n)
      EXPECT_NEAR(m.entries[n].weight, 1e-9, 1e-21);
  }
}

TEST(BuildMapping, ShiftedMatchesBruteForce) {
  // EM cells of 1 mm; thermal cells of 0.75 mm starting at 0.25 mm. All
  // interval ends are multiples of 1/4 mm, so midpoint sampling at 1/16 mm
  // counts overlap volumes exactly.
  const YeeGrid g = em_grid(4, 4, 4);
  const ThermalGrid tg = thermal({0.25e-3, 0.25e-3, 0.25e-3}, {3.25e-3, 3.25e-3, 3.25e-3}, 4, 4, 4);
  const auto m = build_mapping(g, tg, full_mask(g));
  const int s = 16;
  const double h = 1e-3 / s;
  std::vector<double> brute(tg.cells() * g.cells(), 0.0);
  for (int a = 0; a < 4 * s; ++a)
    for (int b = 0; b < 4 * s; ++b)
      for (int c = 0; c < 4 * s; ++c) {
        const double x = (a + 0.5) * h, y = (b + 0.5) * h, z = (c + 0.5) * h;
        auto tidx = [&](double v) { return static_cast<int>(std::floor((v - 0.25e-3) / 0.75e-3)); };
        const int ti = tidx(x), tj = tidx(y), tk = tidx(z);
        if (x < 0.25e-3 || y < 0.25e-3 || z < 0.25e-3 || ti > 3 || tj > 3 || tk > 3) continue;
        const std::size_t t = tg.index(ti, tj, tk);
        const std::size_t e = g.index(a / s, b / s, c / s);
        brute[t * g.cells() + e] += h * h * h;
      }
  for (std::size_t t = 0; t < tg.cells(); ++t) {
    double sum = 0;
    for (std::size_t e = 0; e < g.cells(); ++e) {
      EXPECT_NEAR(weight_between(m, t, e), brute[t * g.cells() + e], 1e-21);
      sum += weight_between(m, t, e);
    }
    EXPECT_NEAR(sum, tg.cell_volume(), 1e-12 * tg.cell_volume());
  }
  for (const auto& e : m.entries) EXPECT_GT(e.weight, 0.0);
}

TEST(BuildMapping, ReverseTableCoversEveryLoadCell) {
  const YeeGrid g = em_grid(5, 5, 5);
  auto mask = std::vector<std::uint8_t>(g.cells(), 0);
  for (int i = 1; i < 4; ++i)
    for (int j = 1; j < 4; ++j)
      for (int k = 2; k < 5; ++k) mask[g.index(i, j, k)] = 1;
  const auto m = build_mapping(g, thermal({1e-3, 1e-3, 2e-3}, {4e-3, 4e-3, 5e-3}, 2, 4, 5), mask);
  ASSERT_EQ(m.em_cells.size(), 27u);
  for (std::size_t n = 0; n < m.em_cells.size(); ++n) {
    EXPECT_TRUE(mask[m.em_cells[n]]);
    double w = 0;
    for (std::size_t r = m.rev_offsets[n]; r < m.rev_offsets[n + 1]; ++r) w += m.rev_entries[r].weight;
    EXPECT_NEAR(w, 1e-9, 1e-21);
  }
}

TEST(BuildMapping, Disjoint) {
  const YeeGrid g = em_grid(4, 4, 4);
  EXPECT_THROW(build_mapping(g, thermal({0, 0, 0}, {1e-3, 1e-3, 1e-3}, 1, 1, 1),
                             std::vector<std::uint8_t>(g.cells(), 0)),
               DisjointDomains);
  auto mask = std::vector<std::uint8_t>(g.cells(), 0);
  mask[g.index(3, 3, 3)] = 1;
  EXPECT_THROW(build_mapping(g, thermal({0, 0, 0}, {1e-3, 1e-3, 1e-3}, 1, 1, 1), mask),
               DisjointDomains);
}

TEST(MapPower, UniformAndHotCell) {
  const YeeGrid g = em_grid(4, 4, 4);
  const ThermalGrid tg = thermal({0, 0, 0}, {4e-3, 4e-3, 4e-3}, 3, 3, 3);
  const auto m = build_mapping(g, tg, full_mask(g));
  const auto u = map_power(m, std::vector<double>(g.cells(), 7.5));
  for (double q : u) EXPECT_NEAR(q, 7.5, 1e-12);

  std::vector<double> hot(g.cells(), 0.0);
  hot[g.index(1, 2, 0)] = 1e6;
  const auto h = map_power(m, hot);
  double total = 0.0;
  for (std::size_t t = 0; t < tg.cells(); ++t) {
    const double expect = 1e6 * weight_between(m, t, g.index(1, 2, 0)) / tg.cell_volume();
    EXPECT_NEAR(h[t], expect, 1e-9 * 1e6);
    total += h[t] * tg.cell_volume();
  }
  EXPECT_NEAR(total, 1e6 * 1e-9, 1e-12 * 1e-3);
}

TEST(MapPower, ConservationRandomized) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0, 1);
  std::uniform_int_distribution<int> N(1, 13);
  for (int trial = 0; trial < 150; ++trial) {
    YeeGrid g;
    g.nx = 4 + N(rng);
    g.ny = 4 + N(rng);
    g.nz = 4 + N(rng);
    g.dx = (0.3 + U(rng)) * 1e-3;
    g.dy = (0.3 + U(rng)) * 1e-3;
    g.dz = (0.1 + U(rng)) * 1e-3;
    std::array<int, 3> lo, hi;
    for (int a = 0; a < 3; ++a) {
      const int n = g.count(a);
      lo[a] = std::uniform_int_distribution<int>(0, n - 2)(rng);
      hi[a] = std::uniform_int_distribution<int>(lo[a] + 1, n)(rng);
    }
    std::vector<std::uint8_t> mask(g.cells(), 0);
    std::vector<double> q(g.cells(), 0.0);
    double expect = 0.0;
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j)
        for (int k = 0; k < g.nz; ++k) {
          const std::size_t c = g.index(i, j, k);
          q[c] = std::exp(6 * U(rng));  // 0 dB to 26 dB spread
          if (i >= lo[0] && i < hi[0] && j >= lo[1] && j < hi[1] && k >= lo[2] && k < hi[2]) {
            mask[c] = 1;
            expect += q[c] * g.cell_volume();
          }
        }
    const ThermalGrid tg = thermal({lo[0] * g.dx, lo[1] * g.dy, lo[2] * g.dz},
                                   {hi[0] * g.dx, hi[1] * g.dy, hi[2] * g.dz}, N(rng), N(rng), N(rng));
    const auto m = build_mapping(g, tg, mask);
    EXPECT_LT(m.max_weight_error, 1e-12);
    const auto qt = map_power(m, q);
    const double got = std::accumulate(qt.begin(), qt.end(), 0.0) * tg.cell_volume();
    ASSERT_NEAR(got / expect, 1.0, 1e-9) << "trial " << trial;
  }
}

TEST(MapPower, Linear) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0, 1);
  const YeeGrid g = em_grid(5, 6, 7, 0.9e-3);
  const ThermalGrid tg = thermal({0, 0, 0}, {4.5e-3, 5.4e-3, 6.3e-3}, 4, 7, 3);
  const auto m = build_mapping(g, tg, full_mask(g));
  std::vector<double> a(g.cells()), b(g.cells()), c(g.cells());
  for (std::size_t n = 0; n < g.cells(); ++n) {
    a[n] = U(rng);
    b[n] = U(rng);
    c[n] = 2.5 * a[n] - 0.75 * b[n];
  }
  const auto ma = map_power(m, a), mb = map_power(m, b), mc = map_power(m, c);
  for (std::size_t t = 0; t < tg.cells(); ++t) EXPECT_NEAR(mc[t], 2.5 * ma[t] - 0.75 * mb[t], 1e-12);
}

TEST(MapPower, GridMismatch) {
  const YeeGrid g = em_grid(2, 2, 2);
  const auto m = build_mapping(g, thermal({0, 0, 0}, {2e-3, 2e-3, 2e-3}, 1, 1, 1), full_mask(g));
  EXPECT_THROW(map_power(m, std::vector<double>(5, 1.0)), GridMismatch);
  PowerMap pm;
  pm.grid = em_grid(2, 2, 3);
  pm.q.assign(12, 1.0);
  EXPECT_THROW(map_power(m, pm), GridMismatch);
}

TEST(MapDielectric, UniformStateGivesUniformProperties) {
  Material mat;
  mat.eps_r = 3.0;
  mat.tan_delta = 0.02;
  mat.eps_slope_T = 0.01;
  mat.tan_slope_alpha = -0.01;
  const YeeGrid g = em_grid(3, 3, 3);
  const ThermalGrid tg = thermal({0, 0, 0}, {3e-3, 3e-3, 3e-3}, 2, 2, 5);
  const auto m = build_mapping(g, tg, full_mask(g));
  const std::vector<const Material*> mats(tg.cells(), &mat);
  const auto up = map_dielectric(m, std::vector<double>(tg.cells(), 350.0),
                                 std::vector<double>(tg.cells(), 0.4), mats, 10e9);
  const EmProperties p = effective_em(mat, 350.0, 0.4);
  for (std::size_t n = 0; n < up.eps_r.size(); ++n) {
    EXPECT_NEAR(up.eps_r[n], p.eps_r, 1e-12);
    EXPECT_NEAR(up.sigma[n], equivalent_conductivity(p, 10e9), 1e-12);
  }
}

TEST(MapDielectric, ZeroSlopesNeverChange) {
  Material mat;
  mat.eps_r = 4.6;
  mat.tan_delta = 0.6;
  const YeeGrid g = em_grid(2, 2, 2);
  const ThermalGrid tg = thermal({0, 0, 0}, {2e-3, 2e-3, 2e-3}, 3, 3, 3);
  const auto m = build_mapping(g, tg, full_mask(g));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> T(250, 600), A(0, 1);
  std::vector<double> t(tg.cells()), a(tg.cells());
  for (std::size_t n = 0; n < t.size(); ++n) {
    t[n] = T(rng);
    a[n] = A(rng);
  }
  const auto up = map_dielectric(m, t, a, std::vector<const Material*>(tg.cells(), &mat), 10.424e9);
  for (std::size_t n = 0; n < up.eps_r.size(); ++n) {
    EXPECT_NEAR(up.eps_r[n], 4.6, 1e-12);
    EXPECT_NEAR(up.sigma[n], oracle::sigma_eff(10.424e9, 4.6, 0.6), 1e-9);
  }
}

TEST(MapDielectric, StepProfileTwoCells) {
  // Two EM cells along z (1 mm each) under three thermal cells (2/3 mm).
  // Thermal T = 300, 300, 400 K; eps = 2 + 0.01 (T - 293.15).
  Material mat;
  mat.eps_r = 2.0;
  mat.eps_slope_T = 0.01;
  const YeeGrid g = em_grid(1, 1, 2);
  const auto m = build_mapping(g, thermal({0, 0, 0}, {1e-3, 1e-3, 2e-3}, 1, 1, 3), full_mask(g));
  const auto up = map_dielectric(m, {300, 300, 400}, {0, 0, 0}, {&mat, &mat, &mat}, 10e9);
  EXPECT_NEAR(up.eps_r[0], 2.0685, 1e-12);
  EXPECT_NEAR(up.eps_r[1], 2.0685 / 3 + 2 * 3.0685 / 3, 1e-12);

  CellMedium medium{{1.0, 1.0}, {0.0, 0.0}};
  apply_dielectric(m, up, medium);
  EXPECT_DOUBLE_EQ(medium.eps_r[0], up.eps_r[0]);
  EXPECT_DOUBLE_EQ(medium.eps_r[1], up.eps_r[1]);
}

TEST(MapDielectric, CellsOutsideLoadUntouched) {
  Material mat;
  mat.eps_r = 5.0;
  const YeeGrid g = em_grid(3, 1, 1);
  std::vector<std::uint8_t> mask{0, 1, 0};
  const auto m = build_mapping(g, thermal({1e-3, 0, 0}, {2e-3, 1e-3, 1e-3}, 2, 1, 1), mask);
  const auto up = map_dielectric(m, {300, 300}, {0, 0}, {&mat, &mat}, 1e9);
  CellMedium medium{{1.5, 1.5, 1.5}, {0.1, 0.1, 0.1}};
  apply_dielectric(m, up, medium);
  EXPECT_EQ(medium.eps_r[0], 1.5);
  EXPECT_EQ(medium.eps_r[2], 1.5);
  EXPECT_EQ(medium.sigma[2], 0.1);
  EXPECT_NEAR(medium.eps_r[1], 5.0, 1e-12);
}
