#include <gtest/gtest.h>

#include <rispre/baselines.hpp>

using namespace rispre;

namespace {

SystemConfig small_cfg() {
  SystemConfig c;
  c.n_tx = 4;
  c.n_rx = 2;
  c.n_h = 2;
  c.n_v = 2;
  c.n_ris = 4;
  return c;
}

}  // namespace

TEST(LabelSet, ThresholdExamples) {
  EXPECT_EQ(near_optimal_label_set({10.0, 9.0, 8.0}, 0.5), (std::vector<bool>{true, true, false}));
  EXPECT_EQ(near_optimal_label_set({5.0}, 0.5), (std::vector<bool>{true}));
  EXPECT_EQ(near_optimal_label_set({0.0, 0.0}, 0.5), (std::vector<bool>{true, true}));
  EXPECT_EQ(near_optimal_label_set({10.0, 9.0, 8.0}, 0.0), (std::vector<bool>{true, false, false}));
}

TEST(LabelSet, ThresholdRatioValue) {
  const double ratio = 0.8912509381337456;
  EXPECT_TRUE(near_optimal_label_set({1.0, ratio + 1e-12})[1]);
  EXPECT_FALSE(near_optimal_label_set({1.0, ratio - 1e-9})[1]);
}

TEST(LabelSet, MonotoneInThreshold) {
  Rng rng = make_stream(3, Stream::eval);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> r(64);
    for (double& x : r) x = u(rng);
    const auto a = near_optimal_label_set(r, 0.25), b = near_optimal_label_set(r, 0.5),
               c = near_optimal_label_set(r, 1.0);
    int best = argmax_first(r);
    EXPECT_TRUE(a[best]);
    for (std::size_t q = 0; q < r.size(); ++q) {
      EXPECT_LE(a[q], b[q]);
      EXPECT_LE(b[q], c[q]);
    }
  }
}

TEST(LabelSet, RejectsBadInput) {
  EXPECT_THROW(near_optimal_label_set({}), std::invalid_argument);
  EXPECT_THROW(near_optimal_label_set({1.0}, -0.1), std::invalid_argument);
}

TEST(ArgmaxFirst, TieBreaksLow) { EXPECT_EQ(argmax_first({1.0, 3.0, 3.0, 2.0}), 1); }

TEST(ExhaustiveSearch, SingleWordCodebook) {
  SystemConfig cfg = small_cfg();
  Codebook cb;
  cb.n_h = 2;
  cb.n_v = 2;
  cb.words = CMat::Ones(4, 1);
  Rng rng = make_stream(1, Stream::channel);
  const auto ch = sample_channels(cfg, rng);
  const auto out = exhaustive_search(ch, cb, 10.0, cfg.noise_watts());
  EXPECT_EQ(out.best_index, 0);
  EXPECT_EQ(out.rates.size(), 1u);
  EXPECT_TRUE(out.label_set[0]);
}

TEST(ExhaustiveSearch, MatchesBruteForceDeterminantOracle) {
  const SystemConfig cfg = small_cfg();
  const Codebook cb = build_codebook(cfg, CodebookKind::practical);
  const double p = dbm_to_watts(40.0);
  for (std::uint64_t i = 0; i < 30; ++i) {
    Rng rng = make_stream(9, Stream::channel, i);
    const auto ch = sample_channels(cfg, rng);
    const auto out = exhaustive_search(ch, cb, p, cfg.noise_watts());
    double best = -1.0;
    int best_q = -1;
    for (int q = 0; q < 4; ++q) {
      CMat h = CMat::Zero(cfg.n_rx, cfg.n_tx);
      for (int n = 0; n < 4; ++n) h += ch.h_r_herm.col(n) * cb.words(n, q) * ch.h_t.row(n);
      const auto pre = svd_precoder(h);
      const double r = spectral_efficiency_det(h, pre.precoder, p, cfg.noise_watts(), pre.n_streams);
      EXPECT_NEAR(out.rates[q], r, 1e-9 * std::max(1.0, r));
      if (r > best) {
        best = r;
        best_q = q;
      }
    }
    EXPECT_EQ(out.best_index, best_q);
  }
}

TEST(AlternatingOptimization, ZeroSweepsReturnsInitialState) {
  const SystemConfig cfg = small_cfg();
  Rng rng = make_stream(2, Stream::channel);
  const auto ch = sample_channels(cfg, rng);
  const auto ao = alternating_optimization(ch, cfg, 10.0, cfg.noise_watts(), 16, 0);
  EXPECT_EQ(ao.sweep_rates.size(), 1u);
  const auto init = ris_config_from_phases(RVec::Zero(4), cfg, false);
  EXPECT_NEAR(ao.rate, evaluate_response(ch, init.response, 10.0, cfg.noise_watts()).rate_bps_hz, 1e-12);
}

TEST(AlternatingOptimization, NonDecreasingAndNearBruteForce) {
  const SystemConfig cfg = small_cfg();
  const double p = dbm_to_watts(40.0), noise = cfg.noise_watts();
  const int grid = 4;
  std::vector<cplx> resp(grid);
  for (int g = 0; g < grid; ++g) {
    const double ph = -kPi + g * 2 * kPi / grid;
    resp[g] = std::polar(amplitude_model(ph, cfg), ph);
  }
  int close = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    Rng rng = make_stream(4, Stream::channel, t);
    const auto ch = sample_channels(cfg, rng);
    const auto ao = alternating_optimization(ch, cfg, p, noise, grid, 30);
    for (std::size_t s = 1; s < ao.sweep_rates.size(); ++s)
      EXPECT_GE(ao.sweep_rates[s], ao.sweep_rates[s - 1]);
    EXPECT_GE(ao.rate, ao.sweep_rates.front());
    double brute = 0.0;
    for (int c = 0; c < 256; ++c) {
      CVec v(4);
      for (int n = 0, k = c; n < 4; ++n, k /= grid) v[n] = resp[k % grid];
      brute = std::max(brute, evaluate_response(ch, v, p, noise).rate_bps_hz);
    }
    EXPECT_LE(ao.rate, brute + 1e-9);
    if (ao.rate >= 0.9 * brute) ++close;
  }
  EXPECT_GE(close, 90);
}

TEST(RandomSelection, UniformOverCodebook) {
  const Codebook cb = build_ideal_codebook(4, 4);
  Rng rng = make_stream(5, Stream::random_baseline);
  const int draws = 160000;
  std::vector<int> counts(16);
  for (int i = 0; i < draws; ++i) ++counts[random_selection(cb, rng)];
  const double expect = draws / 16.0, sigma = std::sqrt(draws * (1.0 / 16) * (15.0 / 16));
  for (int c : counts) EXPECT_NEAR(c, expect, 5 * sigma);
}
