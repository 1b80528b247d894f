#include <gtest/gtest.h>

#include "oracles.hpp"
#include "oven/error.hpp"
#include "oven/materials.hpp"

using namespace oven;

TEST(EffectiveEm, FillerAtReferenceTemperature) {
  const auto p = effective_em(bundled::filler(), 293.15, 0.0);
  EXPECT_DOUBLE_EQ(p.eps_r, 6.0);
  EXPECT_DOUBLE_EQ(p.tan_delta, 0.0005);
}

TEST(EffectiveEm, ZeroSlopesAreIdentity) {
  const Material m = bundled::solder_sample();
  for (double T : {200.0, 293.15, 450.0})
    for (double a : {0.0, 0.4, 1.0}) {
      const auto p = effective_em(m, T, a);
      EXPECT_EQ(p.eps_r, m.eps_r);
      EXPECT_EQ(p.tan_delta, m.tan_delta);
    }
}

TEST(EffectiveEm, CureSlope) {
  Material m = bundled::solder_sample();
  m.tan_slope_alpha = -0.3;
  const auto p = effective_em(m, 293.15, 1.0);
  EXPECT_DOUBLE_EQ(p.eps_r, 4.6);
  EXPECT_NEAR(p.tan_delta, 0.3, 1e-15);
}

TEST(EffectiveEm, ClampsAtPhysicalBounds) {
  Material m = bundled::filler();
  m.eps_slope_T = -1.0;
  m.tan_slope_T = -1.0;
  const auto p = effective_em(m, 400.0, 0.0);
  EXPECT_EQ(p.eps_r, 1.0);
  EXPECT_EQ(p.tan_delta, 0.0);
}

TEST(EffectiveEm, MonotoneInSlope) {
  Material m = bundled::filler();
  double prev = 0.0;
  for (double s : {0.0, 1e-3, 2e-3, 5e-3}) {
    m.eps_slope_T = s;
    const double e = effective_em(m, 350.0, 0.0).eps_r;
    EXPECT_GE(e, prev);
    prev = e;
  }
}

TEST(EffectiveConductivity, SampleAtPaperFrequency) {
  const double f = 10.424e9;
  const double s = effective_conductivity(bundled::solder_sample(), f, 293.15, 0);
  EXPECT_NEAR(s, oracle::sigma_eff(f, 4.6, 0.6), 1e-12);
  EXPECT_NEAR(s, 1.60, 0.005);
}

TEST(EffectiveConductivity, FillerAndContrast) {
  const double f = 10.424e9;
  const double sf = effective_conductivity(bundled::filler(), f, 293.15, 0);
  EXPECT_NEAR(sf, 1.74e-3, 0.005e-3);
  const double ss = effective_conductivity(bundled::solder_sample(), f, 293.15, 0);
  EXPECT_NEAR(ss / sf, 920.0, 1e-9);
}

TEST(EffectiveConductivity, LosslessAndLinear) {
  EXPECT_EQ(effective_conductivity(bundled::air(), 1e10, 293.15, 0), 0.0);
  const Material m = bundled::solder_sample();
  const double s1 = effective_conductivity(m, 5e9, 293.15, 0);
  const double s2 = effective_conductivity(m, 10e9, 293.15, 0);
  EXPECT_NEAR(s2, 2 * s1, 1e-14);
}

TEST(MaterialLibrary, BundledPositiveIffLossy) {
  const auto lib = MaterialLibrary::bundled();
  for (const auto& name : lib.names()) {
    const Material& m = lib.at(name);
    const bool lossy = effective_em(m, 293.15, 0).tan_delta > 0;
    EXPECT_EQ(effective_conductivity(m, 1e10, 293.15, 0) > 0, lossy) << name;
  }
}

TEST(MaterialLibrary, UnknownAndInvalid) {
  auto lib = MaterialLibrary::bundled();
  EXPECT_THROW(lib.at("unobtainium"), InvalidArgument);
  Material bad = bundled::filler();
  bad.eps_r = 0.5;
  EXPECT_THROW(lib.add(bad), InvalidArgument);
  bad = bundled::filler();
  bad.density = 0;
  EXPECT_THROW(lib.add(bad), InvalidArgument);
}

TEST(CureKinetics, Validation) {
  CureKinetics c = *bundled::idealized_polymer().cure;
  EXPECT_NO_THROW(c.validate());
  c.alpha_gel = 1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = *bundled::idealized_polymer().cure;
  c.n = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(CureKinetics, RateFormula) {
  CureKinetics c;
  c.a1 = 2e5;
  c.a2 = 1e6;
  c.e1 = 6e4;
  c.e2 = 5e4;
  c.m = 0.5;
  c.n = 1.5;
  const double T = 400, a = 0.3;
  const double k1 = 2e5 * std::exp(-6e4 / (oracle::kR * T));
  const double k2 = 1e6 * std::exp(-5e4 / (oracle::kR * T));
  EXPECT_NEAR(c.rate(T, a), (k1 + k2 * std::sqrt(a)) * std::pow(0.7, 1.5), 1e-12 * c.rate(T, a));
  EXPECT_EQ(c.rate(0.0, a), 0.0);
  EXPECT_EQ(c.rate(T, 1.0), 0.0);
}
