#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include <rispre/sysmodel.hpp>

using namespace rispre;

namespace {

SystemConfig path_loss_cfg() {
  SystemConfig c;
  c.ref_dist = 1.0;
  c.ref_loss_db = -30.0;
  c.ris_gain_db = 5.0;
  return c;
}

}  // namespace

TEST(SteeringVector, ZeroPhaseIsAllOnes) {
  const CVec a = steering_vector(4, 0.0);
  for (int m = 0; m < 4; ++m) EXPECT_EQ(a[m], cplx(1.0, 0.0));
}

TEST(SteeringVector, PiAlternatesSign) {
  const CVec a = steering_vector(2, kPi);
  EXPECT_NEAR(std::abs(a[0] - cplx(1, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a[1] - cplx(-1, 0)), 0.0, 1e-15);
}

TEST(SteeringVector, NormIsSqrtN) {
  for (int n : {1, 3, 8, 17}) EXPECT_NEAR(steering_vector(n, 1.234).norm(), std::sqrt(n), 1e-12);
}

TEST(SteeringVector, DftGridIsOrthogonal) {
  // Inner product of two grid points is a geometric sum over roots of unity.
  EXPECT_LT(std::abs(steering_vector(8, 2 * kPi / 8).dot(steering_vector(8, 4 * kPi / 8))), 1e-12);
  for (int n : {4, 8, 16})
    for (int k = 0; k < n; ++k)
      for (int l = k + 1; l < n; ++l)
        EXPECT_LT(std::abs(steering_vector(n, 2 * kPi * k / n).dot(steering_vector(n, 2 * kPi * l / n))),
                  1e-9 * n);
}

TEST(SteeringVector, RejectsEmpty) { EXPECT_THROW(steering_vector(0, 0.0), std::invalid_argument); }

TEST(PathLoss, ReferenceDistanceLeavesOnlyConstants) {
  EXPECT_NEAR(path_loss_linear(2.0, 1.0, path_loss_cfg()), std::pow(10.0, -2.5), 1e-15);
}

TEST(PathLoss, TwentyDbPerDecadeAtExponentTwo) {
  EXPECT_NEAR(path_loss_linear(2.0, 10.0, path_loss_cfg()) / std::pow(10.0, -4.5), 1.0, 1e-12);
}

TEST(PathLoss, UserHopDefaults) {
  // 28 log10(30) = 41.3594 dB; 10^((-30 - 41.3594 + 5) / 10)
  EXPECT_NEAR(path_loss_linear(2.8, 30.0, path_loss_cfg()) / 2.3123868276659392e-07, 1.0, 1e-9);
}

TEST(PathLoss, StrictlyDecreasingInDistance) {
  const auto cfg = path_loss_cfg();
  double prev = path_loss_linear(2.0, 1.0, cfg);
  for (double d = 1.5; d < 100.0; d *= 1.5) {
    const double cur = path_loss_linear(2.0, d, cfg);
    EXPECT_LT(cur, prev);
    prev = cur;
  }
}

TEST(PathLoss, BelowReferenceDistanceThrows) {
  EXPECT_THROW(path_loss_linear(2.0, 0.5, path_loss_cfg()), std::invalid_argument);
}

TEST(AmplitudeModel, ExtremesAreExact) {
  const SystemConfig cfg;
  EXPECT_EQ(amplitude_model(cfg.psi0 + kPi / 2, cfg), 1.0);
  EXPECT_EQ(amplitude_model(cfg.psi0 - kPi / 2, cfg), cfg.beta_min);
  EXPECT_EQ(cfg.beta_min, 0.2);
}

TEST(AmplitudeModel, MidpointValue) {
  const SystemConfig cfg;
  // 0.2 + 0.8 * 0.5^1.6
  EXPECT_NEAR(amplitude_model(cfg.psi0, cfg), 0.46390, 1e-5);
  EXPECT_NEAR(amplitude_model(cfg.psi0, cfg), 0.2 + 0.8 * std::pow(0.5, 1.6), 1e-15);
}

TEST(AmplitudeModel, RangeProperty) {
  const SystemConfig cfg;
  for (int i = 0; i <= 10000; ++i) {
    const double psi = -4 * kPi + 8 * kPi * i / 10000.0;
    const double b = amplitude_model(psi, cfg);
    EXPECT_GE(b, cfg.beta_min);
    EXPECT_LE(b, 1.0);
  }
}

TEST(RisConfig, IdealZeroPhasesGiveOnes) {
  SystemConfig cfg;
  const RisConfig r = ris_config_from_phases(RVec::Zero(cfg.n_ris), cfg, true);
  for (Eigen::Index n = 0; n < r.size(); ++n) EXPECT_EQ(r.response[n], cplx(1.0, 0.0));
}

TEST(RisConfig, PracticalZeroPhasesSitNearMinimum) {
  SystemConfig cfg;
  const RisConfig r = ris_config_from_phases(RVec::Zero(cfg.n_ris), cfg, false);
  for (Eigen::Index n = 0; n < r.size(); ++n) {
    EXPECT_NEAR(r.amplitudes[n], 0.20067949427156972, 1e-12);
    EXPECT_NEAR(std::abs(r.response[n]), r.amplitudes[n], 1e-15);
  }
}

TEST(RisConfig, MaximumGainPhaseGivesUnitAmplitude) {
  SystemConfig cfg;
  const RisConfig r =
      ris_config_from_phases(RVec::Constant(cfg.n_ris, cfg.psi0 + kPi / 2), cfg, false);
  for (Eigen::Index n = 0; n < r.size(); ++n) EXPECT_DOUBLE_EQ(r.amplitudes[n], 1.0);
}

TEST(RisConfig, LengthMismatchThrows) {
  SystemConfig cfg;
  EXPECT_THROW(ris_config_from_phases(RVec::Zero(3), cfg, false), std::invalid_argument);
}

TEST(Channels, DimensionsFollowConfig) {
  SystemConfig cfg;
  Rng rng = make_stream(1, Stream::channel);
  const ChannelPair ch = sample_channels(cfg, rng);
  EXPECT_EQ(ch.h_t.rows(), cfg.n_ris);
  EXPECT_EQ(ch.h_t.cols(), cfg.n_tx);
  EXPECT_EQ(ch.h_r_herm.rows(), cfg.n_rx);
  EXPECT_EQ(ch.h_r_herm.cols(), cfg.n_ris);
  EXPECT_TRUE(ch.h_t.allFinite());
  EXPECT_TRUE(ch.h_r_herm.allFinite());
}

TEST(Channels, LosOnlyLimitHasConstantModulus) {
  SystemConfig cfg;
  cfg.rician_t = std::numeric_limits<double>::infinity();
  Rng rng = make_stream(3, Stream::channel);
  const ChannelPair ch = sample_channels(cfg, rng);
  for (Eigen::Index i = 0; i < ch.h_t.size(); ++i)
    EXPECT_NEAR(std::abs(ch.h_t.data()[i]), std::sqrt(ch.l_t), 1e-12 * std::sqrt(ch.l_t));
  Eigen::JacobiSVD<CMat> svd(ch.h_t);
  EXPECT_LT(svd.singularValues()[1], 1e-9 * svd.singularValues()[0]);
}

TEST(Channels, SameSeedIsBitIdentical) {
  SystemConfig cfg;
  Rng a = make_stream(42, Stream::channel), b = make_stream(42, Stream::channel);
  const ChannelPair x = sample_channels(cfg, a), y = sample_channels(cfg, b);
  EXPECT_EQ(std::memcmp(x.h_t.data(), y.h_t.data(), sizeof(cplx) * x.h_t.size()), 0);
  EXPECT_EQ(std::memcmp(x.h_r_herm.data(), y.h_r_herm.data(), sizeof(cplx) * x.h_r_herm.size()), 0);
}

TEST(Channels, DistinctStreamsDiffer) {
  SystemConfig cfg;
  Rng a = make_stream(42, Stream::channel, 0), b = make_stream(42, Stream::channel, 1);
  EXPECT_GT((sample_channels(cfg, a).h_t - sample_channels(cfg, b).h_t).norm(), 0.0);
}

TEST(Channels, NlosGainSecondMomentMonteCarlo) {
  const int draws = 100000;
  Rng rng = make_stream(7, Stream::channel);
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double e = std::norm(draw_nlos_gain(10.0, 2, rng));
    sum += e;
    sum_sq += e * e;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum_sq / draws - mean * mean) / draws);
  EXPECT_NEAR(mean, 1.0 / 22.0, 5.0 * se);
}

TEST(EffectiveChannel, IdentityResponseIsPlainCascade) {
  SystemConfig cfg;
  Rng rng = make_stream(5, Stream::channel);
  const ChannelPair ch = sample_channels(cfg, rng);
  const CMat h = effective_channel(ch, CVec::Ones(cfg.n_ris));
  EXPECT_LT((h - ch.h_r_herm * ch.h_t).norm(), 1e-12 * h.norm());
  EXPECT_EQ(effective_channel(ch, CVec::Zero(cfg.n_ris)).norm(), 0.0);
}

TEST(EffectiveChannel, LinearInResponse) {
  SystemConfig cfg;
  Rng rng = make_stream(6, Stream::channel);
  const ChannelPair ch = sample_channels(cfg, rng);
  const RisConfig r = ris_config_from_phases(RVec::LinSpaced(cfg.n_ris, -3.0, 3.0), cfg, false);
  const cplx c(0.7, -1.3);
  const CMat a = effective_channel(ch, CVec(c * r.response));
  const CMat b = c * effective_channel(ch, r);
  EXPECT_LT((a - b).norm(), 1e-12 * b.norm());
}

TEST(EffectiveChannel, DimensionMismatchThrows) {
  SystemConfig cfg;
  Rng rng = make_stream(6, Stream::channel);
  const ChannelPair ch = sample_channels(cfg, rng);
  EXPECT_THROW(effective_channel(ch, CVec::Ones(5)), std::invalid_argument);
}

TEST(SystemConfigJson, RoundTripAndRejectsUnknownKeys) {
  SystemConfig cfg = SystemConfig::desk();
  cfg.seed = 99;
  const json j = cfg;
  const SystemConfig back = j.get<SystemConfig>();
  EXPECT_EQ(json(back), j);
  json bad = j;
  bad["n_txx"] = 3;
  EXPECT_THROW(bad.get<SystemConfig>(), std::invalid_argument);
  json inconsistent = j;
  inconsistent["n_ris"] = 7;
  EXPECT_THROW(inconsistent.get<SystemConfig>(), std::invalid_argument);
}

TEST(SystemConfigJson, DefaultsMatchReferenceSetup) {
  const SystemConfig c;
  EXPECT_EQ(c.n_tx, 10);
  EXPECT_EQ(c.n_rx, 2);
  EXPECT_EQ(c.n_h * c.n_v, 64);
  EXPECT_EQ(c.n_paths, 2);
  EXPECT_EQ(c.rician_t, 10.0);
  EXPECT_EQ(c.pl_exp_r, 2.8);
  EXPECT_EQ(c.dist_r, 30.0);
  EXPECT_EQ(c.alpha, 1.6);
  EXPECT_NEAR(c.noise_watts(), 1e-11, 1e-24);
}
