#include <gtest/gtest.h>

#include <random>

#include <rispre/precoding.hpp>

using namespace rispre;

namespace {

CMat random_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> g;
  CMat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const double re = g(rng);
    const double im = g(rng);
    m.data()[i] = {re, im};
  }
  return m;
}

}  // namespace

TEST(SvdPrecoder, PaddedIdentityHasTwoUnitStreams) {
  CMat h = CMat::Zero(2, 10);
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  const PrecodingResult r = svd_precoder(h);
  EXPECT_EQ(r.n_streams, 2);
  EXPECT_NEAR(r.singulars[0], 1.0, 1e-14);
  EXPECT_NEAR(r.singulars[1], 1.0, 1e-14);
}

TEST(SvdPrecoder, RankDeficientChannelDropsStream) {
  CMat h = CMat::Zero(2, 2);
  h(0, 0) = 3.0;
  const PrecodingResult r = svd_precoder(h);
  EXPECT_EQ(r.n_streams, 1);
  EXPECT_NEAR(r.singulars[0], 3.0, 1e-14);
  EXPECT_EQ(r.precoder.cols(), 1);
}

TEST(SvdPrecoder, ZeroChannelHasNoStreams) {
  const PrecodingResult r = svd_precoder(CMat::Zero(2, 10));
  EXPECT_EQ(r.n_streams, 0);
  EXPECT_EQ(r.precoder.cols(), 0);
  EXPECT_EQ(spectral_efficiency(r.singulars, 1.0, 1.0, r.n_streams), 0.0);
}

TEST(SvdPrecoder, OrthonormalColumnsAndPowerBudget) {
  Rng rng = make_stream(11, Stream::eval);
  for (int trial = 0; trial < 50; ++trial) {
    const PrecodingResult r = svd_precoder(random_matrix(2, 10, rng));
    ASSERT_EQ(r.n_streams, 2);
    const CMat gram = r.precoder.adjoint() * r.precoder;
    EXPECT_LT((gram - CMat::Identity(2, 2)).norm(), 1e-10);
    EXPECT_LT(std::abs(r.precoder.squaredNorm() - r.n_streams), 1e-9);
    EXPECT_GE(r.singulars[0], r.singulars[1]);
    EXPECT_GT(r.singulars[1], 0.0);
  }
}

TEST(SvdPrecoder, RejectsBadTolerance) {
  EXPECT_THROW(svd_precoder(CMat::Identity(2, 2), 0.0), std::invalid_argument);
  EXPECT_THROW(svd_precoder(CMat::Identity(2, 2), 1.0), std::invalid_argument);
}

TEST(SpectralEfficiency, SymmetricClosedForm) {
  EXPECT_NEAR(spectral_efficiency(RVec::Ones(2), 1.0, 1.0, 2), 2.0 * std::log2(1.5), 1e-14);
  EXPECT_NEAR(spectral_efficiency(RVec::Ones(2), 1.0, 1.0, 2), 1.16993, 1e-5);
}

TEST(SpectralEfficiency, SingleStream) {
  RVec s(1);
  s << 2.5;
  EXPECT_NEAR(spectral_efficiency(s, 1.0, 1.0, 1), std::log2(1.0 + 6.25), 1e-14);
}

TEST(SpectralEfficiency, VanishingPowerAndMonotonicity) {
  RVec s(2);
  s << 3.0, 0.5;
  EXPECT_LT(spectral_efficiency(s, 1e-300, 1.0, 2), 1e-290);
  double prev = 0.0;
  for (double p = 1e-3; p < 1e6; p *= 3.0) {
    const double r = spectral_efficiency(s, p, 1.0, 2);
    EXPECT_GT(r, prev);
    prev = r;
  }
  RVec bigger = s;
  bigger[1] = 0.6;
  EXPECT_GT(spectral_efficiency(bigger, 1.0, 1.0, 2), spectral_efficiency(s, 1.0, 1.0, 2));
}

TEST(SpectralEfficiency, DeterminantOracleAgrees) {
  Rng rng = make_stream(12, Stream::eval);
  for (int trial = 0; trial < 100; ++trial) {
    const CMat h = random_matrix(2, 10, rng) * 1e-5;
    const PrecodingResult r = svd_precoder(h);
    const double sv = spectral_efficiency(r.singulars, 10.0, 1e-11, r.n_streams);
    const double det = spectral_efficiency_det(h, r.precoder, 10.0, 1e-11, r.n_streams);
    EXPECT_LT(std::abs(sv - det) / std::abs(det), 1e-9);
  }
}

TEST(SpectralEfficiency, ZeroPrecoderGivesZeroRate) {
  Rng rng = make_stream(13, Stream::eval);
  const CMat h = random_matrix(2, 10, rng);
  EXPECT_EQ(spectral_efficiency_det(h, CMat::Zero(10, 2), 1.0, 1.0, 2), 0.0);
}

TEST(SpectralEfficiency, ShrinkingPrecoderLowersRate) {
  Rng rng = make_stream(14, Stream::eval);
  const CMat h = random_matrix(2, 10, rng);
  const PrecodingResult r = svd_precoder(h);
  const double full = spectral_efficiency_det(h, r.precoder, 1.0, 1.0, r.n_streams);
  const double half = spectral_efficiency_det(h, r.precoder / std::sqrt(2.0), 1.0, 1.0, r.n_streams);
  EXPECT_LT(half, full);
}

TEST(SpectralEfficiency, DeterminantDimensionMismatchThrows) {
  EXPECT_THROW(spectral_efficiency_det(CMat::Identity(2, 3), CMat::Zero(4, 2), 1, 1, 2),
               std::invalid_argument);
}
