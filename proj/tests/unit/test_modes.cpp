#include <chrono>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "oven/error.hpp"
#include "oven/modes.hpp"

using namespace oven;

namespace {
const CavitySpec kProto{25.5e-3, 25.5e-3, 100e-3, 10e-3, 6.0};
}

TEST(Cutoff, PrototypeValues) {
  EXPECT_NEAR(cutoff_frequency(kProto, 3, 3), 24.94e9, 0.01e9);
  EXPECT_NEAR(cutoff_frequency(kProto, 1, 1), 8.313e9, 0.001e9);
  EXPECT_NEAR(cutoff_frequency(kProto, 1, 1), oracle::box_resonance(25.5e-3, 25.5e-3, 1, 1, 1, 0), 1.0);
  CavitySpec big = kProto;
  big.a *= 2;
  big.b *= 2;
  EXPECT_NEAR(cutoff_frequency(big, 3, 3), 0.5 * cutoff_frequency(kProto, 3, 3), 1e-3);
  EXPECT_NEAR(dielectric_cutoff_frequency(kProto, 3, 3), cutoff_frequency(kProto, 3, 3) / std::sqrt(6.0), 1e-3);
}

TEST(Evanescent, RateAtPaperFrequency) {
  const double a = evanescent_rate(kProto, 3, 3, 10.424e9);
  EXPECT_NEAR(a, 474.8, 0.1);
  EXPECT_NEAR(a, oracle::alpha_air(25.5e-3, 25.5e-3, 3, 3, 10.424e9), 1e-9);
  EXPECT_NEAR(std::exp(-a * 10e-3), 8.7e-3, 0.05e-3);
}

TEST(Evanescent, Limits) {
  const double fc = cutoff_frequency(kProto, 3, 3);
  EXPECT_LT(evanescent_rate(kProto, 3, 3, fc * (1 - 1e-10)), 10.0);
  EXPECT_THROW(evanescent_rate(kProto, 3, 3, fc), AboveCutoff);
  EXPECT_THROW(evanescent_rate(kProto, 3, 3, 1.1 * fc), AboveCutoff);
  const double kc = transverse_wavenumber(kProto, 3, 3);
  EXPECT_NEAR(evanescent_rate(kProto, 3, 3, fc / std::sqrt(2.0)), kc / std::sqrt(2.0), 1e-9 * kc);
}

TEST(Resonances, PrototypeBand) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto modes = solve_resonances(kProto, 3, 3, 10e9, 10.8e9);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(secs, 1.0);
  ASSERT_GE(modes.size(), 2u);
  double best = 1e300;
  for (const auto& m : modes) {
    EXPECT_GE(m.freq, 10e9);
    EXPECT_LE(m.freq, 10.8e9);
    best = std::min(best, std::abs(m.freq - 10.424e9) / 10.424e9);
  }
  EXPECT_LT(best, 0.01);
}

TEST(Resonances, MatchIndependentOracle) {
  const auto modes = solve_resonances(kProto, 3, 3, 10e9, 10.8e9);
  const auto ref = oracle::trapped_roots(25.5e-3, 25.5e-3, 100e-3, 6.0, 3, 3, 10e9, 10.8e9);
  ASSERT_EQ(modes.size(), ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(modes[i].freq, ref[i], 1.0);
  // Root near 10.40 GHz under the semi-infinite model.
  bool found = false;
  for (const auto& m : modes) found |= std::abs(m.freq - 10.40e9) < 0.01e9;
  EXPECT_TRUE(found);
}

TEST(Resonances, Invariants) {
  const auto modes = solve_resonances(kProto, 3, 3, 10e9, 10.8e9);
  const double fd = dielectric_cutoff_frequency(kProto, 3, 3);
  const double fa = cutoff_frequency(kProto, 3, 3);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& m = modes[i];
    EXPECT_LT(std::abs(resonance_residual(kProto, 3, 3, m.freq)) / (6.0 * m.alpha_air), 1e-6);
    EXPECT_GT(m.freq, fd);
    EXPECT_LT(m.freq, fa);
    const double k0 = 2 * oracle::kPi * m.freq / oracle::kC;
    const double kc = transverse_wavenumber(kProto, 3, 3);
    EXPECT_NEAR(m.beta_d * m.beta_d, 6.0 * k0 * k0 - kc * kc, 1e-9 * kc * kc);
    EXPECT_NEAR(m.alpha_air * m.alpha_air, kc * kc - k0 * k0, 1e-9 * kc * kc);
    if (i > 0) {
      EXPECT_GT(m.freq, modes[i - 1].freq);
      EXPECT_EQ(m.branch, modes[i - 1].branch + 1);
    }
  }
}

TEST(Resonances, StableUnderHalvedScan) {
  ResonanceSearch fine;
  fine.grid_step = 0.5e6;
  const auto a = solve_resonances(kProto, 3, 3, 10e9, 10.8e9);
  const auto b = solve_resonances(kProto, 3, 3, 10e9, 10.8e9, fine);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i].freq, b[i].freq, 1e-3);
}

TEST(Resonances, SquareSymmetry) {
  const auto a = solve_resonances(kProto, 3, 1, 10e9, 10.8e9);
  const auto b = solve_resonances(kProto, 1, 3, 10e9, 10.8e9);
  ASSERT_EQ(a.size(), b.size());
  ASSERT_FALSE(a.empty());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_DOUBLE_EQ(a[i].freq, b[i].freq);
}

TEST(Resonances, ClusterAboveDielectricCutoff) {
  const double fd = dielectric_cutoff_frequency(kProto, 3, 3);
  const auto modes = solve_resonances(kProto, 3, 3, fd, 10.8e9);
  ASSERT_GE(modes.size(), 4u);
  EXPECT_LT(modes.front().freq, 10.19e9);
  EXPECT_GT(modes.front().freq, 10.18e9);
  // Spacing widens away from the cutoff.
  for (std::size_t i = 2; i < modes.size(); ++i)
    EXPECT_GT(modes[i].freq - modes[i - 1].freq, modes[i - 1].freq - modes[i - 2].freq);
}

TEST(Resonances, NoContrastOrBandOutside) {
  CavitySpec flat = kProto;
  flat.eps_r = 1.0;
  EXPECT_THROW(solve_resonances(flat, 3, 3, 10e9, 10.8e9), BandOutsideTrappedRegime);
  EXPECT_THROW(solve_resonances(kProto, 3, 3, 5e9, 6e9), BandOutsideTrappedRegime);
  EXPECT_THROW(solve_resonances(kProto, 1, 1, 10e9, 10.8e9), BandOutsideTrappedRegime);
  EXPECT_THROW(solve_resonances(kProto, 3, 3, 10.8e9, 10e9), InvalidArgument);
}
