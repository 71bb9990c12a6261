#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rsm/noise.hpp"

using namespace rsm;

namespace {

oracle::Comb comb_of(const NoiseSpec& spec, const Realization& r) { return {spec.f0(), spec.bandwidth(), r.phases}; }

Realization constant_phases(std::size_t n, double phi) {
  Realization r;
  r.phases.assign(n, phi);
  return r;
}

}  // namespace

TEST(NoiseSpec, RejectsInvalidParameters) {
  EXPECT_THROW(NoiseSpec(0.0, 10), ConfigError);
  EXPECT_THROW(NoiseSpec(-1.0, 10), ConfigError);
  EXPECT_THROW(NoiseSpec(1.0, 0), ConfigError);
  EXPECT_THROW(NoiseSpec(1.0, 10, 0.0), ConfigError);
  EXPECT_NO_THROW(NoiseSpec(1.0, 1));
}

TEST(NoiseSpec, FrequencyCombHasNoDcTerm) {
  NoiseSpec spec(1.0, 250);
  EXPECT_DOUBLE_EQ(spec.bandwidth(), 8.0 * std::numbers::pi);
  EXPECT_GT(spec.frequency(1), 0.0);
  EXPECT_DOUBLE_EQ(spec.frequency(250), spec.bandwidth());
  EXPECT_DOUBLE_EQ(spec.fundamental_period(), 62.5);
}

TEST(DrawRealization, IsAPureFunctionOfSpecAndSeed) {
  NoiseSpec spec(1.0, 250);
  const auto a = draw_realization(spec, 42);
  const auto b = draw_realization(spec, 42);
  ASSERT_EQ(a.phases.size(), 250u);
  EXPECT_EQ(a.phases, b.phases);  // bit-identical
  EXPECT_EQ(a.seed, 42u);
  EXPECT_NE(draw_realization(spec, 43).phases, a.phases);
}

TEST(DrawRealization, PhasesLieInHalfOpenCircle) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (double phi : draw_realization(NoiseSpec(1.0, 1), seed).phases) {
      EXPECT_GE(phi, 0.0);
      EXPECT_LT(phi, kTwoPi);
    }
  }
}

TEST(DrawRealization, FirstPhaseMatchesDocumentedGenerator) {
  // phase = 2 pi * (u >> 11) * 2^-53 with u the first mt19937_64 output for the seed
  std::mt19937_64 gen(5489u);
  const double expected = kTwoPi * static_cast<double>(gen() >> 11) * 0x1.0p-53;
  EXPECT_EQ(draw_realization(NoiseSpec(1.0, 3), 5489u).phases[0], expected);
}

TEST(DrawRealization, CosineMeanIsStatisticallyZero) {
  const auto r = draw_realization(NoiseSpec(1.0, 250), 7);
  double s = 0.0;
  for (double phi : r.phases) s += std::cos(phi);
  EXPECT_LT(std::abs(s / 250.0), 4.0 / std::sqrt(250.0));
}

TEST(ForceAt, ClosedFormCases) {
  NoiseSpec spec(2.5, 17);
  EXPECT_NEAR(force_at(spec, constant_phases(17, 0.0), 0.0), 2.5, 1e-15);
  EXPECT_NEAR(force_at(spec, constant_phases(17, std::numbers::pi / 2), 0.0), 0.0, 1e-15);
  EXPECT_THROW(force_at(spec, constant_phases(16, 0.0), 0.0), ConfigError);
}

TEST(ForceAt, BoundedByAmplitudeOnFigureOneSpectrum) {
  NoiseSpec spec(1.0, 200);
  const auto r = draw_realization(spec, 1);
  const BandLimitedForce fast(spec, r);
  for (int k = 0; k <= 5000; ++k) {
    const double tau = 50.0 * k / 5000.0;
    EXPECT_LE(std::abs(force_at(spec, r, tau)), 1.0);
    EXPECT_LE(std::abs(fast.force(tau)), 1.0);
  }
}

TEST(BandLimitedForce, HornerEvaluationMatchesDirectSum) {
  NoiseSpec spec(1.3, 250);
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> tau_dist(-50.0, 500.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = draw_realization(spec, 100 + trial);
    const BandLimitedForce fast(spec, r);
    const double tau = tau_dist(gen);
    EXPECT_NEAR(fast.force(tau), force_at(spec, r, tau), 1e-12);
    EXPECT_NEAR(fast.integral(tau), force_integral(spec, r, tau), 1e-12);
  }
}

TEST(ForceIntegral, VanishesAtZero) {
  NoiseSpec spec(1.0, 250);
  const auto r = draw_realization(spec, 3);
  EXPECT_EQ(force_integral(spec, r, 0.0), 0.0);
  EXPECT_NEAR(BandLimitedForce(spec, r).integral(0.0), 0.0, 1e-15);
}

TEST(ForceIntegral, SingleCosineAntiderivative) {
  NoiseSpec spec(1.0, 1);
  const auto r = constant_phases(1, 0.0);
  for (double tau : {0.1, 0.37, 1.0, 12.25}) {
    const double expected = std::sin(8.0 * std::numbers::pi * tau) / (8.0 * std::numbers::pi);
    EXPECT_NEAR(force_integral(spec, r, tau), expected, 1e-15);
  }
}

TEST(ForceIntegral, MatchesQuadratureOracleAtFixedPoint) {
  NoiseSpec spec(1.0, 250);
  const auto r = draw_realization(spec, 42);
  const double ref = oracle::impulse(comb_of(spec, r), 3.7);
  const double scale = std::max(std::abs(ref), spec.f0() / spec.bandwidth());
  EXPECT_NEAR(force_integral(spec, r, 3.7), ref, 1e-9 * scale);
}

TEST(ForceIntegral, NegativeProperTimeIsSupported) {
  NoiseSpec spec(1.0, 40);
  const auto r = draw_realization(spec, 9);
  // integral over [0, -a] is minus the integral over [-a, 0]
  const double ref = -oracle::integrate([&](double s) { return force_at(spec, r, s); }, -2.0, 0.0);
  EXPECT_NEAR(force_integral(spec, r, -2.0), ref, 1e-12);
}

TEST(ForceNoise, HasNoDcComponentOverAFundamentalPeriod) {
  NoiseSpec spec(1.0, 250);
  const auto comb = comb_of(spec, draw_realization(spec, 5));
  const double avg = oracle::impulse(comb, spec.fundamental_period()) / spec.fundamental_period();
  EXPECT_LT(std::abs(avg), 1e-9 * spec.f0());
}

TEST(ForceNoise, VarianceIsStationaryAcrossPeriodWindows) {
  NoiseSpec spec(1.0, 250);
  const BandLimitedForce f(spec, 8);
  const double T = spec.fundamental_period();
  const auto first = sample_force(f, T, 20000);
  double v1 = 0.0, v2 = 0.0;
  for (std::size_t k = 0; k < first.size(); ++k) {
    v1 += first[k] * first[k];
    const double x = f.force(T + T * static_cast<double>(k) / 20000.0);
    v2 += x * x;
  }
  EXPECT_NEAR(v1 / v2, 1.0, 0.05);
}

TEST(ForceDistribution, SymmetricBinsBoundedSupportZeroMean) {
  NoiseSpec spec(1.0, 250);
  const BandLimitedForce f(spec, 2);
  const auto xs = sample_force(f, spec.fundamental_period(), 100000);
  const auto h = force_distribution(f, spec.fundamental_period(), 100000, 51);
  EXPECT_NEAR(h.total_mass(), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(h.edges.front(), -h.edges.back());
  for (std::size_t k = 0; k < h.n_bins(); ++k) {
    if (h.edges[k] >= 1.0 || h.edges[k + 1] <= -1.0) EXPECT_EQ(h.density[k], 0.0);
  }
  double mean = 0.0, sq = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  for (double x : xs) sq += (x - mean) * (x - mean);
  const double sigma = std::sqrt(sq / static_cast<double>(xs.size()));
  EXPECT_LT(std::abs(mean), 3.0 * sigma / std::sqrt(static_cast<double>(xs.size())));
}

TEST(ForceDistribution, DegenerateAmplitudePutsAllMassInTheZeroBin) {
  NoiseSpec spec(1e-300, 250);
  const BandLimitedForce f(spec, 4);
  const auto h = force_distribution(f, spec.fundamental_period(), 1000, 11);
  const std::size_t zero_bin = 5;
  EXPECT_LE(h.edges[zero_bin], 0.0);
  EXPECT_GT(h.edges[zero_bin + 1], 0.0);
  EXPECT_NEAR(h.mass(zero_bin), 1.0, 1e-12);
}

TEST(ForceDistribution, ValidatesCountsAndWarnsOnShortHorizon) {
  NoiseSpec spec(1.0, 250);
  const BandLimitedForce f(spec, 4);
  EXPECT_THROW(force_distribution(f, 62.5, 99, 10), ConfigError);
  EXPECT_THROW(force_distribution(f, 62.5, 1000, 0), ConfigError);
  Diagnostics diag;
  force_distribution(f, 10.0, 1000, 10, &diag);
  EXPECT_EQ(diag.warnings.size(), 1u);
  diag.warnings.clear();
  force_distribution(f, 62.5, 1000, 10, &diag);
  EXPECT_TRUE(diag.warnings.empty());
}
