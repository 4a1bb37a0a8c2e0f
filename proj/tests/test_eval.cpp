#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <rispre/eval.hpp>

using namespace rispre;

namespace {

ModelContext desk_context() {
  ModelContext ctx;
  ctx.system = SystemConfig::desk();
  ctx.pilot_seed = 3;
  return ctx;
}

nn::ModelParams untrained_model(const ModelContext& ctx) {
  ExperimentConfig e = ExperimentConfig::desk();
  e.system = ctx.system;
  e.sync_dims();
  nn::ModelParams p = nn::init_params(e.model, 1);
  p.bn_ready = true;
  return p;
}

}  // namespace

TEST(PowerSweep, EsOnlyNormalizesToHundred) {
  SweepOptions opt;
  opt.powers_dbm = {20, 40};
  opt.schemes = {Scheme::es};
  opt.trials = 10;
  const EvalReport r = run_power_sweep(nullptr, desk_context(), opt);
  ASSERT_EQ(r.rows.size(), 2u);
  for (const auto& row : r.rows) {
    EXPECT_DOUBLE_EQ(row.norm_se_pct, 100.0);
    EXPECT_LE(row.p5, row.mean_se);
    EXPECT_GE(row.p95, row.p5);
  }
  EXPECT_GT(r.find(40, "ES")->mean_se, r.find(20, "ES")->mean_se);
}

TEST(PowerSweep, SameSeedReproduces) {
  const auto ctx = desk_context();
  auto model = untrained_model(ctx);
  SweepOptions opt;
  opt.powers_dbm = {30};
  opt.trials = 8;
  opt.seed = 5;
  opt.ao_max_sweeps = 3;
  const EvalReport a = run_power_sweep(&model, ctx, opt), b = run_power_sweep(&model, ctx, opt);
  EXPECT_TRUE(a == b);
  EXPECT_EQ(report_csv(a), report_csv(b));
  for (const char* s : {"LSTM", "Random"}) {
    EXPECT_LE(a.find(30, s)->norm_se_pct, 100.0);
    EXPECT_GT(a.find(30, s)->norm_se_pct, 0.0);
  }
  EXPECT_GE(a.find(30, "AO")->mean_se, 0.0);
  EXPECT_EQ(a.metadata.at("trials"), 8);
}

TEST(PowerSweep, LstmWithoutModelIsRejected) {
  SweepOptions opt;
  opt.schemes = {Scheme::lstm};
  EXPECT_THROW(run_power_sweep(nullptr, desk_context(), opt), std::invalid_argument);
  opt.schemes = {Scheme::es};
  opt.trials = 0;
  EXPECT_THROW(run_power_sweep(nullptr, desk_context(), opt), std::invalid_argument);
}

TEST(PowerSweep, MismatchedModelIsRejected) {
  auto ctx = desk_context();
  auto model = untrained_model(ctx);
  ctx.system = SystemConfig{};
  SweepOptions opt;
  opt.schemes = {Scheme::lstm};
  EXPECT_THROW(run_power_sweep(&model, ctx, opt), std::invalid_argument);
}

TEST(Cost, FlopsAreTwicePerMacAndEnergyScales) {
  const Cost c = cost_from_macs(1e9);
  EXPECT_DOUBLE_EQ(c.flops, 2e9);
  EXPECT_NEAR(c.joules, 0.2, 1e-12);
}

TEST(Cost, LstmCostGrowsLinearlyInSteps) {
  nn::Architecture a;
  a.input_dim = 640;
  const double c8 = lstm_cost(a, 8).flops, c16 = lstm_cost(a, 16).flops, c32 = lstm_cost(a, 32).flops;
  EXPECT_NEAR(c32 - c16, 2 * (c16 - c8), 1e-6 * c32);
  EXPECT_GT(c16, c8);
}

TEST(Cost, EsCostScalesWithCodebookSize) {
  SystemConfig a, b;
  b.n_v = 4;
  b.n_ris = 32;
  EXPECT_GT(es_cost(a).flops, es_cost(b).flops);
  EXPECT_NEAR(es_cost(a).flops / codeword_eval_macs(a), 2.0 * 64, 1e-9);
  EXPECT_LT(random_cost().flops, es_cost(b).flops);
  EXPECT_GT(ao_cost(a, 16, 2).flops, ao_cost(a, 16, 1).flops);
}

TEST(Export, CsvHeaderAndJsonRoundTrip) {
  EvalReport r;
  r.rows.push_back({20.0, "ES", 1.5, 100.0, 0.5, 2.5, 0.01, 1e5, 1e-5});
  r.rows.push_back({20.0, "Random", 0.1 + 0.2, 20.0, 0.0, 1.0, 0.0, 2.0, 2e-10});
  r.metadata = {{"seed", 1}};
  const std::string csv = report_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "power_dbm,scheme,mean_se,norm_se_pct,p5,p95,ms_median,flops,joules");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_NE(csv.find("0.30000000000000004"), std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "rispre_eval_test";
  std::filesystem::create_directories(dir);
  export_report(r, dir / "r.json", ReportFormat::json);
  EXPECT_TRUE(load_report_json(dir / "r.json") == r);
  export_report(r, dir / "r.csv", ReportFormat::csv);
  std::ifstream in(dir / "r.csv");
  EXPECT_EQ(std::string(std::istreambuf_iterator<char>(in), {}), csv);
  std::filesystem::remove_all(dir);
}

TEST(Robustness, ZeroPerturbationMatchesBaseline) {
  const auto ctx = desk_context();
  auto model = untrained_model(ctx);
  const RobustnessReport r = robustness_study(model, ctx, 0.0, 6, 2);
  ASSERT_EQ(r.entries.size(), 8u);
  for (const auto& e : r.entries) EXPECT_DOUBLE_EQ(e.norm_se_pct, r.baseline_norm_se_pct);
  EXPECT_EQ(r.worst, "none");
}

TEST(Timing, RandomIsFastestAndEsShrinksWithCodebook) {
  auto ctx = desk_context();
  auto model = untrained_model(ctx);
  TimingOptions opt;
  opt.trials = 15;
  opt.include_ao = false;
  const auto full = benchmark_timing(model, ctx, opt);
  EXPECT_LT(full.at("Random"), full.at("ES"));
  EXPECT_LT(full.at("Random"), full.at("LSTM"));

  ModelContext half = ctx;
  half.system.n_v = 2;
  half.system.n_ris = 8;
  auto half_model = untrained_model(half);
  const auto small = benchmark_timing(half_model, half, opt);
  EXPECT_LT(small.at("ES"), full.at("ES"));
}

TEST(ConfigHash, StableAndSensitive) {
  SystemConfig a;
  EXPECT_EQ(config_hash(a), config_hash(SystemConfig{}));
  SystemConfig b;
  b.dist_r = 31;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(PowerSweep, RandomSelectionBandAtLowPower) {
  SweepOptions opt;
  opt.powers_dbm = {20, 30};
  opt.schemes = {Scheme::es, Scheme::random};
  opt.trials = 300;
  opt.seed = 3;
  const EvalReport r = run_power_sweep(nullptr, desk_context(), opt);
  for (double p : {20.0, 30.0}) {
    const double pct = r.find(p, "Random")->norm_se_pct;
    EXPECT_GE(pct, 20.0) << p;
    EXPECT_LE(pct, 50.0) << p;
  }
  EXPECT_LT(r.find(20, "Random")->norm_se_pct, r.find(30, "Random")->norm_se_pct);
}
