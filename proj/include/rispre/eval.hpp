#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "baselines.hpp"
#include "experiment.hpp"
#include "neural/network.hpp"

namespace rispre {

inline constexpr double kJoulesPerFlop = 0.1 / 1e9;  // 1 GFLOP ~ 0.1 J

enum class Scheme { es, ao, lstm, random };

inline const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::es: return "ES";
    case Scheme::ao: return "AO";
    case Scheme::lstm: return "LSTM";
    case Scheme::random: return "Random";
  }
  return "?";
}

inline Scheme scheme_from_string(const std::string& s) {
  for (Scheme k : {Scheme::es, Scheme::ao, Scheme::lstm, Scheme::random})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

struct ReportRow {
  double power_dbm = 0.0;
  std::string scheme;
  double mean_se = 0.0;
  double norm_se_pct = 0.0;
  double p5 = 0.0;
  double p95 = 0.0;
  double ms_median = 0.0;
  double flops = 0.0;
  double joules = 0.0;

  bool operator==(const ReportRow&) const = default;
};

struct EvalReport {
  std::vector<ReportRow> rows;
  json metadata = json::object();

  const ReportRow* find(double power_dbm, const std::string& scheme) const {
    for (const auto& r : rows)
      if (r.power_dbm == power_dbm && r.scheme == scheme) return &r;
    return nullptr;
  }
  bool operator==(const EvalReport& o) const { return rows == o.rows && metadata == o.metadata; }
};

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string config_hash(const SystemConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(json(cfg).dump())));
  return buf;
}

// --- analytic complexity ---------------------------------------------------

struct Cost {
  double flops = 0.0;
  double joules = 0.0;
};

inline Cost cost_from_macs(double macs) { return {2.0 * macs, 2.0 * macs * kJoulesPerFlop}; }

/// MACs of one forward pass: per step and layer 4H(D_in + H + 1), then the
/// dense stack and output layer.
inline Cost lstm_cost(const nn::Architecture& a, int steps) {
  const double h = a.lstm_hidden;
  const double per_step = 4.0 * h * (a.input_dim + h + 1.0) + 4.0 * h * (h + h + 1.0);
  const double head = a.dense1 * (h + 1.0) + a.dense2 * (a.dense1 + 1.0) +
                      a.outputs * (a.dense2 + 1.0);
  return cost_from_macs(steps * per_step + head);
}

/// Real MACs to score one codeword: diagonal scaling and cascade product
/// (complex MAC = 4 real MACs), then the N_r x N_r Gram matrix and its
/// eigen-decomposition behind the SVD rate.
inline double codeword_eval_macs(const SystemConfig& cfg) {
  const double n = cfg.n_ris, nt = cfg.n_tx, nr = cfg.n_rx;
  const double cascade = 4.0 * (nr * n + nr * n * nt);
  const double rate = 4.0 * (nr * nr * nt) + 4.0 * nr * nr * nr + nr;
  return cascade + rate;
}

inline Cost es_cost(const SystemConfig& cfg) {
  return cost_from_macs(static_cast<double>(cfg.n_h) * cfg.n_v * codeword_eval_macs(cfg));
}

/// AO cost for a given number of sweeps: each sweep scores phase_grid
/// candidates for each of the N elements plus one full precoder refresh.
inline Cost ao_cost(const SystemConfig& cfg, int phase_grid, double sweeps) {
  const double nr = cfg.n_rx, ns = std::min(cfg.n_rx, cfg.n_tx);
  const double candidate = 4.0 * (nr * ns + nr * ns * ns) + ns * ns * ns;
  const double per_sweep = cfg.n_ris * (phase_grid * candidate + 4.0 * nr * ns) + codeword_eval_macs(cfg);
  return cost_from_macs(codeword_eval_macs(cfg) + sweeps * per_sweep);
}

inline Cost random_cost() { return {1.0, kJoulesPerFlop}; }

// --- sweeps ----------------------------------------------------------------

struct SweepOptions {
  std::vector<double> powers_dbm;
  std::vector<Scheme> schemes{Scheme::es, Scheme::ao, Scheme::lstm, Scheme::random};
  int trials = 100;
  std::uint64_t seed = 0;
  double threshold = 0.5;
  int ao_phase_grid = 16;
  int ao_max_sweeps = 30;
  bool measure_time = false;
};

namespace detail {

inline double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline double median(std::vector<double> v) { return percentile(std::move(v), 0.5); }

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

template <typename F>
double time_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Per-realization LSTM decision: observe the uplink under the reference
/// state, run one inference pass and decode a codeword index.
inline int lstm_decide(nn::ModelParams& model, const Observer& obs, const ChannelPair& ch,
                       double p_ul_watts, Rng& noise_rng, double threshold) {
  const FeatureSequence f = obs.observe(ch, p_ul_watts, noise_rng);
  const FeatureSequence* ptr = &f;
  const nn::Mat probs = nn::model_forward(std::span(&ptr, 1), model, {.mode = nn::Mode::infer});
  return nn::decode_codeword(std::span<const double>(probs.data(), static_cast<std::size_t>(probs.rows())),
                             threshold);
}

/// Mean spectral efficiency of each scheme over fresh channel realizations at
/// each power, normalized to ES. Realization t uses the same channel at every
/// power. AO is not codebook-constrained; metadata flags when it beats ES.
inline EvalReport run_power_sweep(nn::ModelParams* model, const ModelContext& ctx,
                                  const SweepOptions& opt) {
  if (opt.trials < 1) throw std::invalid_argument("run_power_sweep: trials must be >= 1");
  const SystemConfig& cfg = ctx.system;
  const Observer obs(cfg, ctx.observation, ctx.pilot_seed);
  const Codebook cb = build_codebook(cfg, ctx.observation.codebook);
  const bool want_lstm =
      std::find(opt.schemes.begin(), opt.schemes.end(), Scheme::lstm) != opt.schemes.end();
  if (want_lstm) {
    if (!model) throw std::invalid_argument("run_power_sweep: LSTM scheme requires a model");
    if (model->arch.input_dim != obs.feature_dim() || model->arch.outputs != cb.size())
      throw std::invalid_argument("run_power_sweep: model dimensions do not match the configuration");
  }
  const std::vector<double> powers = opt.powers_dbm.empty() ? cfg.powers_dbm : opt.powers_dbm;

  EvalReport rep;
  json ao_flags = json::object();
  for (std::size_t pi = 0; pi < powers.size(); ++pi) {
    const double p = dbm_to_watts(powers[pi]);
    std::map<Scheme, std::vector<double>> rates, times;
    std::vector<double> es_ref;  // normalization reference, kept even when ES is not reported
    for (int t = 0; t < opt.trials; ++t) {
      Rng ch_rng = make_stream(opt.seed, Stream::eval, static_cast<std::uint64_t>(t));
      const ChannelPair ch = sample_channels(cfg, ch_rng);
      SearchOutcome es;
      const double t_es = detail::time_ms([&] { es = exhaustive_search(ch, cb, p, cfg.noise_watts()); });
      es_ref.push_back(es.best_rate);
      for (Scheme s : opt.schemes) {
        double rate = 0.0, ms = 0.0;
        switch (s) {
          case Scheme::es:
            rate = es.best_rate;
            ms = t_es;
            break;
          case Scheme::ao: {
            AoResult ao;
            ms = detail::time_ms([&] {
              ao = alternating_optimization(ch, cfg, p, cfg.noise_watts(), opt.ao_phase_grid,
                                            opt.ao_max_sweeps);
            });
            rate = ao.rate;
            break;
          }
          case Scheme::random: {
            Rng r = make_stream(opt.seed ^ static_cast<std::uint64_t>(pi), Stream::random_baseline,
                                static_cast<std::uint64_t>(t));
            int q = 0;
            ms = detail::time_ms([&] { q = random_selection(cb, r); });
            rate = es.rates[q];
            break;
          }
          case Scheme::lstm: {
            Rng noise = make_stream(opt.seed + 0x51ED2701ULL * (pi + 1), Stream::uplink_noise,
                                    static_cast<std::uint64_t>(t));
            int q = 0;
            ms = detail::time_ms([&] { q = lstm_decide(*model, obs, ch, p, noise, opt.threshold); });
            rate = es.rates[q];
            break;
          }
        }
        rates[s].push_back(rate);
        times[s].push_back(ms);
      }
    }
    const double es_mean = detail::mean(es_ref);
    for (Scheme s : opt.schemes) {
      ReportRow row;
      row.power_dbm = powers[pi];
      row.scheme = to_string(s);
      row.mean_se = detail::mean(rates[s]);
      row.norm_se_pct = es_mean > 0.0 ? 100.0 * row.mean_se / es_mean : 0.0;
      row.p5 = detail::percentile(rates[s], 0.05);
      row.p95 = detail::percentile(rates[s], 0.95);
      row.ms_median = opt.measure_time ? detail::median(times[s]) : 0.0;
      Cost c;
      switch (s) {
        case Scheme::es: c = es_cost(cfg); break;
        case Scheme::ao: c = ao_cost(cfg, opt.ao_phase_grid, opt.ao_max_sweeps); break;
        case Scheme::lstm: c = lstm_cost(model->arch, cfg.pilot_len); break;
        case Scheme::random: c = random_cost(); break;
      }
      row.flops = c.flops;
      row.joules = c.joules;
      if (s == Scheme::lstm || s == Scheme::random)
        if (row.norm_se_pct > 100.0 + 1e-9)
          throw std::logic_error("run_power_sweep: codebook-constrained scheme exceeded ES");
      if (s == Scheme::ao && row.norm_se_pct > 100.0) ao_flags[json(powers[pi]).dump()] = true;
      rep.rows.push_back(row);
    }
  }
  rep.metadata = json{{"config_hash", config_hash(cfg)},
                      {"seed", opt.seed},
                      {"pilot_seed", ctx.pilot_seed},
                      {"trials", opt.trials},
                      {"threshold", opt.threshold},
                      {"codebook", to_string(ctx.observation.codebook)},
                      {"ao_phase_grid", opt.ao_phase_grid},
                      {"ao_max_sweeps", opt.ao_max_sweeps},
                      {"ao_exceeds_codebook", ao_flags},
                      {"timed", opt.measure_time}};
  return rep;
}

// --- held-out scoring -------------------------------------------------------

struct HeldOutScore {
  std::size_t samples = 0;
  double lstm_pct = 0.0;    // sum of decoded-codeword rates over sum of ES rates
  double random_pct = 0.0;  // expectation of a uniform pick, same normalization
  double hit_rate = 0.0;    // decoded codeword inside the near-optimal label set
  double top1_rate = 0.0;   // decoded codeword equals the ES argmax
};

/// Scores a model on labelled samples using their stored per-codeword rates.
inline HeldOutScore score_held_out(nn::ModelParams& model, const std::vector<Sample>& samples,
                                   double threshold = 0.5) {
  if (samples.empty()) throw std::invalid_argument("score_held_out: no samples");
  const nn::Mat probs = nn::predict(model, samples);
  double es = 0.0, lstm = 0.0, rnd = 0.0;
  std::size_t hits = 0, top1 = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    if (s.rates.size() != static_cast<std::size_t>(probs.rows()))
      throw std::invalid_argument("score_held_out: samples carry no per-codeword rates");
    const auto col = static_cast<Eigen::Index>(i);
    const int q = nn::decode_codeword(
        std::span<const double>(probs.col(col).data(), static_cast<std::size_t>(probs.rows())), threshold);
    es += s.rates[s.best_index];
    lstm += s.rates[q];
    double sum = 0.0;
    for (float r : s.rates) sum += r;
    rnd += sum / static_cast<double>(s.rates.size());
    hits += s.labels[q] ? 1 : 0;
    top1 += q == s.best_index ? 1 : 0;
  }
  const double n = static_cast<double>(samples.size());
  return {samples.size(), 100.0 * lstm / es, 100.0 * rnd / es, hits / n, top1 / n};
}

inline void to_json(json& j, const HeldOutScore& s) {
  j = json{{"samples", s.samples},   {"lstm_norm_se_pct", s.lstm_pct},
           {"random_norm_se_pct", s.random_pct}, {"label_hit_rate", s.hit_rate},
           {"top1_rate", s.top1_rate}};
}

// --- timing ----------------------------------------------------------------

struct TimingOptions {
  int trials = 50;
  int warmup = 5;
  std::uint64_t seed = 0;
  double power_dbm = kDefaultLabelPowerDbm;
  bool include_ao = true;
};

/// Median wall-clock milliseconds per channel realization for each scheme.
/// ES covers scoring every codeword; LSTM covers preprocessing, one
/// inference pass and decoding.
inline std::map<std::string, double> benchmark_timing(nn::ModelParams& model,
                                                      const ModelContext& ctx,
                                                      const TimingOptions& opt) {
  const SystemConfig& cfg = ctx.system;
  const Observer obs(cfg, ctx.observation, ctx.pilot_seed);
  const Codebook cb = build_codebook(cfg, ctx.observation.codebook);
  const double p = dbm_to_watts(opt.power_dbm);
  std::map<std::string, std::vector<double>> ms;
  volatile double sink = 0.0;
  for (int t = -opt.warmup; t < opt.trials; ++t) {
    const auto idx = static_cast<std::uint64_t>(t + opt.warmup);
    Rng ch_rng = make_stream(opt.seed, Stream::eval, idx);
    const ChannelPair ch = sample_channels(cfg, ch_rng);
    Rng noise = make_stream(opt.seed, Stream::uplink_noise, idx);
    Rng pick = make_stream(opt.seed, Stream::random_baseline, idx);
    const double es = detail::time_ms([&] { sink = sink + exhaustive_search(ch, cb, p, cfg.noise_watts()).best_rate; });
    const double ls = detail::time_ms([&] { sink = sink + lstm_decide(model, obs, ch, p, noise, 0.5); });
    const double rn = detail::time_ms([&] { sink = sink + random_selection(cb, pick); });
    double ao = 0.0;
    if (opt.include_ao)
      ao = detail::time_ms([&] { sink = sink + alternating_optimization(ch, cfg, p, cfg.noise_watts()).rate; });
    if (t < 0) continue;
    ms["ES"].push_back(es);
    ms["LSTM"].push_back(ls);
    ms["Random"].push_back(rn);
    if (opt.include_ao) ms["AO"].push_back(ao);
  }
  std::map<std::string, double> out;
  for (auto& [k, v] : ms) out[k] = detail::median(v);
  return out;
}

// --- robustness --------------------------------------------------------------

struct RobustnessEntry {
  std::string parameter;
  double factor = 1.0;
  double norm_se_pct = 0.0;
};

struct RobustnessReport {
  double baseline_norm_se_pct = 0.0;
  std::vector<RobustnessEntry> entries;
  double worst_norm_se_pct = 0.0;
  std::string worst;
};

/// Normalized SE of the LSTM decision on channels drawn with one of
/// xi_t, xi_r, K_t, K_r scaled by (1 +- perturb_frac), the rest at training values.
inline RobustnessReport robustness_study(nn::ModelParams& model, const ModelContext& ctx,
                                         double perturb_frac, int trials, std::uint64_t seed,
                                         double threshold = 0.5) {
  SweepOptions opt;
  opt.powers_dbm = {ctx.label_power_dbm};
  opt.schemes = {Scheme::es, Scheme::lstm};
  opt.trials = trials;
  opt.seed = seed;
  opt.threshold = threshold;

  RobustnessReport rep;
  rep.baseline_norm_se_pct =
      run_power_sweep(&model, ctx, opt).find(ctx.label_power_dbm, "LSTM")->norm_se_pct;
  rep.worst_norm_se_pct = rep.baseline_norm_se_pct;
  rep.worst = "none";
  struct Knob {
    const char* name;
    double SystemConfig::*field;
  };
  const Knob knobs[] = {{"pl_exp_t", &SystemConfig::pl_exp_t},
                        {"pl_exp_r", &SystemConfig::pl_exp_r},
                        {"rician_t", &SystemConfig::rician_t},
                        {"rician_r", &SystemConfig::rician_r}};
  for (const Knob& k : knobs)
    for (double factor : {1.0 - perturb_frac, 1.0 + perturb_frac}) {
      ModelContext pc = ctx;
      pc.system.*(k.field) *= factor;
      const double pct = run_power_sweep(&model, pc, opt).find(ctx.label_power_dbm, "LSTM")->norm_se_pct;
      rep.entries.push_back({k.name, factor, pct});
      if (pct < rep.worst_norm_se_pct) {
        rep.worst_norm_se_pct = pct;
        rep.worst = std::string(k.name) + "x" + json(factor).dump();
      }
    }
  return rep;
}

inline void to_json(json& j, const RobustnessReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"parameter", e.parameter}, {"factor", e.factor}, {"norm_se_pct", e.norm_se_pct}});
  j = json{{"baseline_norm_se_pct", r.baseline_norm_se_pct},
           {"entries", entries},
           {"worst_norm_se_pct", r.worst_norm_se_pct},
           {"worst", r.worst}};
}

// --- export ----------------------------------------------------------------

enum class ReportFormat { csv, json };

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string report_csv(const EvalReport& r) {
  std::ostringstream os;
  os << "power_dbm,scheme,mean_se,norm_se_pct,p5,p95,ms_median,flops,joules\n";
  for (const auto& row : r.rows)
    os << format_number(row.power_dbm) << ',' << row.scheme << ',' << format_number(row.mean_se)
       << ',' << format_number(row.norm_se_pct) << ',' << format_number(row.p5) << ','
       << format_number(row.p95) << ',' << format_number(row.ms_median) << ','
       << format_number(row.flops) << ',' << format_number(row.joules) << '\n';
  return os.str();
}

inline json report_json(const EvalReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"power_dbm", row.power_dbm},
                    {"scheme", row.scheme},
                    {"mean_se", row.mean_se},
                    {"norm_se_pct", row.norm_se_pct},
                    {"p5", row.p5},
                    {"p95", row.p95},
                    {"ms_median", row.ms_median},
                    {"flops", row.flops},
                    {"joules", row.joules}});
  return json{{"format", "rispre-report"}, {"version", 1}, {"metadata", r.metadata}, {"rows", rows}};
}

inline void export_report(const EvalReport& r, const std::filesystem::path& path, ReportFormat fmt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("export_report: cannot open " + path.string());
  if (fmt == ReportFormat::csv)
    out << report_csv(r);
  else
    out << report_json(r).dump(2) << '\n';
  if (!out) throw std::runtime_error("export_report: write failed for " + path.string());
}

inline EvalReport load_report_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_report_json: cannot open " + path.string());
  const json j = json::parse(in);
  if (j.value("format", "") != "rispre-report") throw FormatError("load_report_json: not a report");
  EvalReport r;
  r.metadata = j.at("metadata");
  for (const auto& row : j.at("rows"))
    r.rows.push_back({row.at("power_dbm"), row.at("scheme"), row.at("mean_se"), row.at("norm_se_pct"),
                      row.at("p5"), row.at("p95"), row.at("ms_median"), row.at("flops"),
                      row.at("joules")});
  return r;
}

}  // namespace rispre
