#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

#include "oracles.hpp"
#include "rsm/kinematics.hpp"
#include "rsm/stats.hpp"

using namespace rsm;

namespace {

// f0 / (bandwidth m0 c) = 0.1 1/s with m0 = c = 1
NoiseSpec drive_spec() { return NoiseSpec(0.1 * NoiseSpec::kDefaultBandwidth, 250); }

std::shared_ptr<const BandLimitedForce> drive_force(std::uint64_t seed) {
  return std::make_shared<const BandLimitedForce>(drive_spec(), seed);
}

// f0 -> 0 limit
std::shared_ptr<const BandLimitedForce> null_force() {
  return std::make_shared<const BandLimitedForce>(NoiseSpec(1e-300, 250), 1);
}

}  // namespace

TEST(ParticleModel, ValidatesParameters) {
  EXPECT_THROW(ParticleModel(0.0, 1.0, 0.0, null_force()), ConfigError);
  EXPECT_THROW(ParticleModel(1.0, -1.0, 0.0, null_force()), ConfigError);
  EXPECT_THROW(ParticleModel(1.0, 1.0, 0.0, nullptr), ConfigError);
  EXPECT_THROW(ParticleModel(1.0, 1.0, INFINITY, null_force()), ConfigError);
}

TEST(Rapidity, VanishingForceGivesConstantRapidity) {
  const auto rest = ParticleModel::with_initial_rapidity(1.0, 1.0, 0.0, null_force());
  const auto moving = ParticleModel::with_initial_rapidity(2.0, 3.0, 0.3, null_force());
  for (double tau : {0.0, 1.0, 77.7}) {
    EXPECT_NEAR(rapidity_at(rest, tau), 0.0, 1e-290);
    EXPECT_NEAR(rapidity_at(moving, tau), 0.3, 1e-15);
  }
}

TEST(Rapidity, MatchesQuadratureOfTheForce) {
  const auto f = drive_force(42);
  const auto m = ParticleModel::with_initial_rapidity(1.0, 1.0, 0.3, f);
  const oracle::Comb comb{f->spec().f0(), f->spec().bandwidth(), f->realization().phases};
  const double expected = (oracle::impulse(comb, 10.0) + m.c_hat()) / (m.m0() * m.c());
  EXPECT_NEAR(rapidity_at(m, 10.0), expected, 1e-9);
}

TEST(Rapidity, BoostShiftsEveryProperTimeByTheSameAmount) {
  const auto m = ParticleModel::with_initial_rapidity(1.5, 2.0, 0.1, drive_force(3));
  const double delta = 0.7;
  const auto b = m.boosted(delta);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> tau(0.0, 1000.0);
  for (int k = 0; k < 200; ++k) {
    const double s = tau(gen);
    EXPECT_NEAR(rapidity_at(b, s) - rapidity_at(m, s), delta / (m.m0() * m.c()), 1e-13);
  }
}

TEST(Rapidity, MeanConventionCentresTheDrift) {
  const auto f = drive_force(9);
  const auto mean = ParticleModel::with_mean_rapidity(1.0, 1.0, 0.25, f);
  const auto init = ParticleModel::with_initial_rapidity(1.0, 1.0, 0.25, f);
  EXPECT_NEAR(rapidity_at(init, 0.0), 0.25, 1e-15);
  // period-average of the rapidity under the mean convention is theta0
  const double T = f->spec().fundamental_period();
  double acc = 0.0;
  const int n = 40000;
  for (int k = 0; k < n; ++k) acc += rapidity_at(mean, T * k / n);
  EXPECT_NEAR(acc / n, 0.25, 1e-12);
}

TEST(Velocity, TanhOfRapidity) {
  EXPECT_NEAR(velocity_at_proper_time(ParticleModel::with_initial_rapidity(1, 1, 0.0, null_force()), 5.0), 0.0, 1e-290);
  const auto m = ParticleModel::with_initial_rapidity(1.0, 1.0, 0.3, null_force());
  EXPECT_NEAR(velocity_at_proper_time(m, 12.0), 0.29131, 5e-6);
}

TEST(Velocity, StaysStrictlySubluminalForHugeRapidity) {
  for (double theta : {5.0, 19.0, 40.0, 700.0}) {
    const auto m = ParticleModel::with_initial_rapidity(1.0, 3.0, theta, null_force());
    EXPECT_LT(velocity_at_proper_time(m, 0.0), 3.0);
    EXPECT_GT(-velocity_at_proper_time(m.boosted(-2.0 * 3.0 * theta), 0.0), -3.0);
    EXPECT_LT(std::abs(velocity_at_proper_time(m.boosted(-2.0 * 3.0 * theta), 0.0)), 3.0);
  }
}

TEST(Velocity, LongRunProperTimeAverageIsNearTanhOfDrift) {
  const auto m = ParticleModel::with_mean_rapidity(1.0, 1.0, 0.3, drive_force(17));
  const double avg = proper_time_mean_velocity(m, 50.0 * m.noise().fundamental_period());
  EXPECT_NEAR(avg, std::tanh(0.3), 0.02);
}

TEST(LabTime, ZeroVelocityGivesIdentity) {
  const auto m = ParticleModel::with_initial_rapidity(1.0, 1.0, 0.0, null_force());
  EXPECT_EQ(lab_time_of(m, 0.0), 0.0);
  EXPECT_NEAR(lab_time_of(m, 123.0), 123.0, 1e-12);
}

TEST(LabTime, ConstantGammaIsCoshTheta) {
  const auto m = ParticleModel::with_initial_rapidity(1.0, 1.0, 0.8, null_force());
  EXPECT_NEAR(lab_time_of(m, 50.0), 50.0 * std::cosh(0.8), 1e-9 * 50.0);
}

TEST(LabTime, RejectsBadArguments) {
  const auto m = ParticleModel::with_initial_rapidity(1.0, 1.0, 0.0, null_force());
  EXPECT_THROW(lab_time_of(m, -1.0), DomainError);
  EXPECT_THROW(lab_time_of(m, 1.0, 0.0), ConfigError);
}

TEST(LabTime, MatchesIndependentQuadrature) {
  const auto f = drive_force(6);
  const auto m = ParticleModel::with_mean_rapidity(1.0, 1.0, 0.3, f);
  const oracle::Comb comb{f->spec().f0(), f->spec().bandwidth(), f->realization().phases};
  // gamma from the oracle's own impulse integral: 1/sqrt(1 - v^2) with v = tanh(theta)
  const auto gamma = [&](double s) {
    const double v = std::tanh((oracle::impulse(comb, s) + m.c_hat()));
    return 1.0 / std::sqrt(1.0 - v * v);
  };
  const double ref = oracle::integrate(gamma, 0.0, 3.0, 0.5);
  EXPECT_NEAR(lab_time_of(m, 3.0), ref, 1e-8 * ref);
}

TEST(LabTime, SlopeMatchesLorentzFactorAndIsAtLeastOne) {
  const auto m = ParticleModel::with_mean_rapidity(1.0, 1.0, 0.3, drive_force(2));
  const double h = 1e-3;
  for (int k = 0; k < 20; ++k) {
    const double tau = 5.0 + 0.37 * k;
    const double slope = (lab_time_of(m, tau + h, 1e-12) - lab_time_of(m, tau - h, 1e-12)) / (2.0 * h);
    EXPECT_GE(slope, 1.0 - 1e-8);
    EXPECT_NEAR(slope / lorentz_factor_at(m, tau), 1.0, 1e-5);
  }
}

TEST(ProperTime, FixedPointAtZero) {
  const auto m = ParticleModel::with_mean_rapidity(1.0, 1.0, 0.4, drive_force(1));
  EXPECT_EQ(proper_time_of(m, 0.0), 0.0);
  EXPECT_THROW(proper_time_of(m, -1.0), DomainError);
}

TEST(ProperTime, ConstantGammaClosedForm) {
  const auto m = ParticleModel::with_initial_rapidity(1.0, 1.0, 1.1, null_force());
  for (double t : {0.5, 10.0, 400.0}) EXPECT_NEAR(proper_time_of(m, t), t / std::cosh(1.1), 1e-8 * std::max(1.0, t));
}

TEST(ProperTime, RoundTripsThroughLabTime) {
  const auto m = ParticleModel::with_mean_rapidity(1.0, 1.0, -0.2, drive_force(8));
  const double tol = 1e-9;
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> dist(0.0, 100.0);
  for (int k = 0; k < 100; ++k) {
    const double tau = dist(gen);
    const double back = proper_time_of(m, lab_time_of(m, tau, tol), tol);
    EXPECT_NEAR(back, tau, 10.0 * tol * std::max(1.0, tau));
  }
}

TEST(Trajectory, ParticleAtRestStaysPut) {
  const auto m = ParticleModel::with_initial_rapidity(1.0, 1.0, 0.0, null_force());
  const auto s = trajectory(m, 100.0, 50, 2.5);
  ASSERT_EQ(s.size(), 51u);
  for (double x : s.x) EXPECT_EQ(x, 2.5);
}

TEST(Trajectory, UniformMotion) {
  const double theta = 0.6;
  const auto m = ParticleModel::with_initial_rapidity(1.0, 2.0, theta, null_force());
  const auto s = trajectory(m, 40.0, 400, -1.0);
  for (std::size_t k = 0; k < s.size(); ++k) {
    EXPECT_NEAR(s.x[k], -1.0 + 2.0 * std::tanh(theta) * s.t[k], 1e-9);
    EXPECT_NEAR(s.tau[k], s.t[k] / std::cosh(theta), 1e-7);
  }
}

TEST(Trajectory, SeriesInvariants) {
  const auto m = ParticleModel::with_mean_rapidity(1.0, 1.0, 0.01, drive_force(4));
  const auto s = trajectory(m, 200.0, 4000);
  ASSERT_EQ(s.tau.size(), s.size());
  ASSERT_EQ(s.v.size(), s.size());
  EXPECT_EQ(s.t.front(), 0.0);
  EXPECT_EQ(s.t.back(), 200.0);
  for (std::size_t k = 0; k < s.size(); ++k) {
    EXPECT_LT(std::abs(s.v[k]), 1.0);
    EXPECT_GE(s.t[k], s.tau[k] - 1e-9);
    if (k > 0) {
      EXPECT_GT(s.t[k], s.t[k - 1]);
      EXPECT_GT(s.tau[k], s.tau[k - 1]);
    }
  }
}

TEST(Trajectory, ValidatesArguments) {
  const auto m = ParticleModel::with_initial_rapidity(1.0, 1.0, 0.0, null_force());
  EXPECT_THROW(trajectory(m, 0.0, 10), ConfigError);
  EXPECT_THROW(trajectory(m, 1.0, 1), ConfigError);
}

TEST(Trajectory, SmallDriftWandersLargeDriftDoesNot) {
  const double T = 20.0 * drive_spec().fundamental_period();
  const auto slow = trajectory(ParticleModel::with_mean_rapidity(1.0, 1.0, 0.01, drive_force(1)), T, 20000);
  const auto fast = trajectory(ParticleModel::with_mean_rapidity(1.0, 1.0, 0.4, drive_force(1)), T, 20000);
  EXPECT_GT(count_sign_changes(slow.v), 10u);
  EXPECT_EQ(count_sign_changes(fast.v), 0u);
  EXPECT_NEAR((fast.x.back() - fast.x.front()) / T, std::tanh(0.4), 0.02);
}

TEST(DriftConservation, RunningAverageSettles) {
  const double T = 20.0 * drive_spec().fundamental_period();
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto m = ParticleModel::with_mean_rapidity(1.0, 1.0, 0.3, drive_force(seed));
    const double a = proper_time_mean_velocity(m, T);
    const double b = proper_time_mean_velocity(m, 2.0 * T);
    EXPECT_LT(std::abs(a - b), 0.02) << "seed " << seed;
  }
}

TEST(ForceTransform, GammaFactorArithmetic) {
  EXPECT_EQ(proper_to_lab_force(2.0, 0.0, 1.0), 2.0);
  EXPECT_NEAR(proper_to_lab_force(2.0, 0.6, 1.0), 2.5, 1e-15);
  EXPECT_NEAR(lab_to_proper_force(2.5, 0.6, 1.0), 2.0, 1e-15);
  EXPECT_THROW(proper_to_lab_force(1.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(lab_to_proper_force(1.0, -2.0, 1.0), DomainError);
}

TEST(ForceTransform, InversePairComposesToIdentity) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> f(-10.0, 10.0), v(-0.999, 0.999);
  for (int k = 0; k < 1000; ++k) {
    const double fp = f(gen), vel = v(gen);
    EXPECT_NEAR(lab_to_proper_force(proper_to_lab_force(fp, vel, 1.0), vel, 1.0), fp, 1e-12 * std::abs(fp) + 1e-15);
  }
}
