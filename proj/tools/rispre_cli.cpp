#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <rispre/eval.hpp>
#include <rispre/neural/model_io.hpp>

using namespace rispre;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON config file, or a profile name (full, desk)")->required();
  cmd->add_option("--seed", c.seed, "Master seed")->required();
  cmd->add_option("--out", c.out, "Output path")->required();
}

ExperimentConfig resolve_config(const std::string& arg) {
  if (arg == "full" || arg == "desk") return ExperimentConfig::named(arg);
  return load_experiment(arg);
}

std::vector<double> parse_powers(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("bad power value '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("--powers needs at least one value");
  return out;
}

std::vector<Scheme> parse_schemes(const std::string& s) {
  std::vector<Scheme> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(scheme_from_string(tok));
  return out;
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

nn::ModelParams load_with_context(const std::string& dir, ModelContext& ctx) {
  json extra;
  nn::ModelParams m = nn::load_model(dir, &extra);
  if (!extra.contains("context")) throw FormatError("model has no observation context");
  ctx = extra.at("context").get<ModelContext>();
  return m;
}

int cmd_gen(const Common& c, std::size_t samples, unsigned threads) {
  const ExperimentConfig e = resolve_config(c.config);
  const std::size_t n = samples ? samples : e.samples;
  Dataset d = generate_dataset(e.system, n, e.label_power_dbm, c.seed, e.observation, threads);
  d.meta.fractions = e.fractions;
  save_dataset(d, c.out);
  std::cout << json{{"command", "gen"}, {"samples", n}, {"out", c.out},
                    {"feature_dim", d.meta.feature_dim}, {"num_codewords", d.meta.num_codewords}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_train(const Common& c, const std::string& data, bool single_label, int epochs) {
  ExperimentConfig e = resolve_config(c.config);
  if (single_label) e.model.head = nn::Head::single_label;
  e.train.seed = c.seed;
  if (epochs >= 0) e.train.max_epochs = epochs;

  const Dataset d = load_dataset(data);
  if (d.meta.feature_dim != e.model.input_dim || d.meta.num_codewords != e.model.outputs)
    throw ConsistencyError("dataset dimensions do not match the configured model");
  const Splits s = split(d, d.meta.fractions);
  nn::ModelParams init = nn::init_params(e.model, c.seed);
  nn::fit_input_normalization(init, s.train);
  const nn::TrainResult r = nn::train(s.train, s.val, init, e.train);

  nn::ModelParams best = r.params;
  const HeldOutScore score = score_held_out(best, s.test.samples, e.train.sigmoid_threshold);
  const ModelContext ctx{d.meta.config, d.meta.options, d.meta.seed, d.meta.label_power_dbm};
  const json history{{"train_loss", r.history.train_loss},
                     {"val_loss", r.history.val_loss},
                     {"best_epoch", r.history.best_epoch}};
  save_model(best, c.out,
             {{"context", ctx}, {"train", e.train}, {"history", history}, {"test", score}});
  std::cout << json{{"command", "train"}, {"out", c.out}, {"history", history}, {"test", score}}.dump()
            << '\n';
  return 0;
}

int cmd_eval(const Common& c, const std::string& model_dir, int trials, const std::string& powers,
             double threshold, const std::string& schemes, const std::string& data, bool timed) {
  const ExperimentConfig e = resolve_config(c.config);
  SweepOptions opt;
  opt.trials = trials;
  opt.seed = c.seed;
  opt.threshold = threshold;
  opt.measure_time = timed;
  if (!powers.empty()) opt.powers_dbm = parse_powers(powers);
  if (!schemes.empty()) opt.schemes = parse_schemes(schemes);

  ModelContext ctx{e.system, e.observation, e.system.seed, e.label_power_dbm};
  std::optional<nn::ModelParams> model;
  if (!model_dir.empty()) model = load_with_context(model_dir, ctx);
  else std::erase(opt.schemes, Scheme::lstm);

  EvalReport rep = run_power_sweep(model ? &*model : nullptr, ctx, opt);
  if (!data.empty()) {
    if (!model) throw std::invalid_argument("--data requires --model");
    const Dataset d = load_dataset(data);
    rep.metadata["held_out"] = score_held_out(*model, split(d, d.meta.fractions).test.samples, threshold);
  }
  const fs::path out(c.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  const bool as_json = out.extension() == ".json";
  export_report(rep, out, as_json ? ReportFormat::json : ReportFormat::csv);
  fs::path twin = out;
  twin.replace_extension(as_json ? ".csv" : ".json");
  export_report(rep, twin, as_json ? ReportFormat::csv : ReportFormat::json);
  std::cout << json{{"command", "eval"}, {"rows", rep.rows.size()}, {"out", c.out}}.dump() << '\n';
  return 0;
}

int cmd_bench(const Common& c, const std::string& model_dir, int trials, bool with_ao) {
  const ExperimentConfig e = resolve_config(c.config);
  ModelContext ctx{e.system, e.observation, e.system.seed, e.label_power_dbm};
  nn::ModelParams model;
  if (!model_dir.empty()) {
    model = load_with_context(model_dir, ctx);
  } else {
    model = nn::init_params(e.model, c.seed);
    model.bn_ready = true;
  }
  TimingOptions opt;
  opt.trials = trials;
  opt.seed = c.seed;
  opt.power_dbm = ctx.label_power_dbm;
  opt.include_ao = with_ao;
  const auto ms = benchmark_timing(model, ctx, opt);

  const Cost lstm = lstm_cost(model.arch, ctx.system.pilot_len);
  const Cost es = es_cost(ctx.system);
  json costs{{"LSTM", {{"flops", lstm.flops}, {"joules", lstm.joules}}},
             {"ES", {{"flops", es.flops}, {"joules", es.joules}}},
             {"Random", {{"flops", random_cost().flops}, {"joules", random_cost().joules}}}};
  const json doc{{"format", "rispre-bench"},
                 {"config_hash", config_hash(ctx.system)},
                 {"seed", c.seed},
                 {"trials", trials},
                 {"median_ms", ms},
                 {"lstm_over_es_time", ms.at("LSTM") / ms.at("ES")},
                 {"analytic", costs},
                 {"lstm_over_es_energy", lstm.joules / es.joules}};
  write_json(c.out, doc);
  std::cout << doc.dump() << '\n';
  return 0;
}

int cmd_robust(const Common& c, const std::string& model_dir, int trials, double frac,
               double threshold) {
  ModelContext ctx;
  nn::ModelParams model = load_with_context(model_dir, ctx);
  const RobustnessReport r = robustness_study(model, ctx, frac, trials, c.seed, threshold);
  json doc = r;
  doc["format"] = "rispre-robustness";
  doc["perturb_frac"] = frac;
  doc["trials"] = trials;
  doc["seed"] = c.seed;
  doc["worst_over_baseline"] = r.worst_norm_se_pct / r.baseline_norm_se_pct;
  write_json(c.out, doc);
  std::cout << doc.dump() << '\n';
  return 0;
}

int cmd_codebook(const Common& c, bool ideal) {
  const ExperimentConfig e = resolve_config(c.config);
  const fs::path stem(c.out);
  if (stem.has_parent_path()) fs::create_directories(stem.parent_path());
  export_codebook(build_codebook(e.system, ideal ? CodebookKind::ideal : e.observation.codebook), stem);
  std::cout << json{{"command", "codebook"}, {"out", c.out}}.dump() << '\n';
  return 0;
}

void emit_error(const char* kind, const std::string& msg) {
  std::cerr << json{{"error", {{"type", kind}, {"message", msg}}}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS codeword selection toolkit"};
  app.require_subcommand(1);

  Common c;
  std::size_t samples = 0;
  unsigned threads = 1;
  std::string data, model_dir, powers, schemes;
  bool single_label = false, timed = false, with_ao = false, ideal = false;
  int epochs = -1, trials = 100;
  double threshold = 0.5, frac = 0.2;

  auto* gen = app.add_subcommand("gen", "Generate a labelled dataset");
  add_common(gen, c);
  gen->add_option("--samples", samples, "Sample count (default from config)");
  gen->add_option("--threads", threads, "Worker threads; output is identical for any count")
      ->check(CLI::Range(1u, 256u));

  auto* tr = app.add_subcommand("train", "Train a codeword predictor");
  add_common(tr, c);
  tr->add_option("--data", data, "Dataset directory")->required();
  tr->add_flag("--single-label", single_label, "Train the softmax single-label head");
  tr->add_option("--epochs", epochs, "Override max_epochs");

  auto* ev = app.add_subcommand("eval", "Power sweep report");
  add_common(ev, c);
  ev->add_option("--model", model_dir, "Model directory (omit to skip the LSTM scheme)");
  ev->add_option("--trials", trials, "Channel realizations per power")->check(CLI::PositiveNumber);
  ev->add_option("--powers", powers, "Comma-separated transmit powers in dBm");
  ev->add_option("--threshold", threshold, "Sigmoid decision threshold")->check(CLI::Range(0.0, 1.0));
  ev->add_option("--schemes", schemes, "Comma-separated subset of ES,AO,LSTM,Random");
  ev->add_option("--data", data, "Dataset whose test split is also scored");
  ev->add_flag("--timed", timed, "Record median wall-clock per scheme");

  auto* be = app.add_subcommand("bench", "Timing and complexity benchmark");
  add_common(be, c);
  be->add_option("--model", model_dir, "Model directory (default: untrained weights)");
  be->add_option("--trials", trials, "Timed realizations")->check(CLI::PositiveNumber);
  be->add_flag("--with-ao", with_ao, "Also time the AO baseline");

  auto* ro = app.add_subcommand("robust", "Channel-parameter mismatch study");
  add_common(ro, c);
  ro->add_option("--model", model_dir, "Model directory")->required();
  ro->add_option("--trials", trials, "Realizations per perturbation")->check(CLI::PositiveNumber);
  ro->add_option("--perturb", frac, "Relative perturbation")->check(CLI::Range(0.0, 0.99));
  ro->add_option("--threshold", threshold, "Sigmoid decision threshold")->check(CLI::Range(0.0, 1.0));

  auto* cb = app.add_subcommand("codebook", "Export the codebook for audit");
  add_common(cb, c);
  cb->add_flag("--ideal", ideal, "Export the unit-modulus codebook");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("usage", e.what());
    return 64;
  }

  try {
    if (*gen) return cmd_gen(c, samples, threads);
    if (*tr) return cmd_train(c, data, single_label, epochs);
    if (*ev) return cmd_eval(c, model_dir, trials, powers, threshold, schemes, data, timed);
    if (*be) return cmd_bench(c, model_dir, trials, with_ao);
    if (*ro) return cmd_robust(c, model_dir, trials, frac, threshold);
    if (*cb) return cmd_codebook(c, ideal);
  } catch (const VersionError& e) {
    emit_error("version", e.what());
    return 3;
  } catch (const TruncatedError& e) {
    emit_error("truncated", e.what());
    return 3;
  } catch (const ConsistencyError& e) {
    emit_error("consistency", e.what());
    return 3;
  } catch (const FormatError& e) {
    emit_error("format", e.what());
    return 3;
  } catch (const json::exception& e) {
    emit_error("config", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    emit_error("invalid_argument", e.what());
    return 2;
  } catch (const std::exception& e) {
    emit_error("runtime", e.what());
    return 1;
  }
  return 1;
}
