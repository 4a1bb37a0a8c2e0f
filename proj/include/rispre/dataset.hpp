#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "baselines.hpp"
#include "binary_io.hpp"
#include "codebook.hpp"
#include "pilots.hpp"

namespace rispre {

inline constexpr int kDatasetFormatVersion = 1;
inline constexpr double kDefaultLabelPowerDbm = 40.0;

/// Knobs that determine how observations and labels are produced, shared by
/// dataset generation and evaluation so both see identical feature pipelines.
struct ObservationOptions {
  CodebookKind codebook = CodebookKind::practical;
  FeatureMode features = FeatureMode::kron_even;
  ReferenceMode reference = ReferenceMode::zero;
  double delta_db = kNearOptimalDb;
};

inline void to_json(json& j, const ObservationOptions& o) {
  j = json{{"codebook", to_string(o.codebook)},
           {"features", to_string(o.features)},
           {"reference", to_string(o.reference)},
           {"delta_db", o.delta_db}};
}

inline void from_json(const json& j, ObservationOptions& o) {
  detail::reject_unknown_keys(j, {"codebook", "features", "reference", "delta_db"},
                              "ObservationOptions");
  if (j.contains("codebook"))
    o.codebook = j.at("codebook").get<std::string>() == "ideal" ? CodebookKind::ideal
                                                                : CodebookKind::practical;
  if (j.contains("features")) o.features = feature_mode_from_string(j.at("features"));
  if (j.contains("reference")) o.reference = reference_mode_from_string(j.at("reference"));
  detail::read_opt(j, "delta_db", o.delta_db);
}

/// Everything needed to turn a channel realization into network features.
///
/// The pilot matrix is one known training sequence shared by every sample of
/// a dataset (drawn once from the dataset seed); only its power changes with
/// the uplink power. Received blocks are divided by the known pilot amplitude
/// sqrt(P_ul / N_r) before preprocessing.
class Observer {
 public:
  Observer(const SystemConfig& cfg, const ObservationOptions& opts, std::uint64_t seed)
      : cfg_(cfg), opts_(opts), seed_(seed) {
    cfg_.validate();
    reference_ = reference_ris(cfg_, opts_.reference, seed_);
    Rng rng = make_stream(seed_, Stream::pilots);
    unit_pilots_ = generate_pilots(cfg_, static_cast<double>(cfg_.n_rx), rng);
  }

  const SystemConfig& config() const { return cfg_; }
  const ObservationOptions& options() const { return opts_; }
  const RisConfig& reference() const { return reference_; }
  int feature_dim() const { return rispre::feature_dim(cfg_.n_tx, cfg_.n_ris, opts_.features); }

  CMat pilots(double p_ul_watts) const {
    return unit_pilots_ * std::sqrt(p_ul_watts / cfg_.n_rx);
  }

  FeatureSequence observe(const ChannelPair& ch, double p_ul_watts, Rng& noise_rng) const {
    const CMat received = uplink_receive(ch, reference_, pilots(p_ul_watts), cfg_.noise_watts(), noise_rng);
    return preprocess_features(received / std::sqrt(p_ul_watts / cfg_.n_rx), reference_,
                               opts_.features);
  }

 private:
  SystemConfig cfg_;
  ObservationOptions opts_;
  std::uint64_t seed_;
  RisConfig reference_;
  CMat unit_pilots_;
};

struct Sample {
  FeatureSequence features;
  std::vector<std::uint8_t> labels;
  int best_index = 0;
  std::vector<float> rates;
};

struct DatasetMeta {
  SystemConfig config;
  ObservationOptions options;
  int pilot_len = 0;
  int feature_dim = 0;
  int num_codewords = 0;
  std::array<double, 3> fractions{0.8, 0.1, 0.1};
  double label_power_dbm = kDefaultLabelPowerDbm;
  std::uint64_t seed = 0;
  bool has_rates = true;
};

struct Dataset {
  DatasetMeta meta;
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
};

inline bool operator==(const FeatureSequence& a, const FeatureSequence& b) {
  return a.steps.rows() == b.steps.rows() && a.steps.cols() == b.steps.cols() &&
         std::equal(a.steps.data(), a.steps.data() + a.steps.size(), b.steps.data(),
                    [](float x, float y) { return std::bit_cast<std::uint32_t>(x) == std::bit_cast<std::uint32_t>(y); });
}

inline bool operator==(const Sample& a, const Sample& b) {
  return a.features == b.features && a.labels == b.labels && a.best_index == b.best_index &&
         a.rates.size() == b.rates.size() &&
         std::equal(a.rates.begin(), a.rates.end(), b.rates.begin(), [](float x, float y) {
           return std::bit_cast<std::uint32_t>(x) == std::bit_cast<std::uint32_t>(y);
         });
}

inline bool operator==(const SystemConfig& a, const SystemConfig& b) {
  return json(a) == json(b);
}
inline bool operator==(const ObservationOptions& a, const ObservationOptions& b) {
  return json(a) == json(b);
}
inline bool operator==(const DatasetMeta& a, const DatasetMeta& b) {
  return a.config == b.config && a.options == b.options && a.pilot_len == b.pilot_len &&
         a.feature_dim == b.feature_dim && a.num_codewords == b.num_codewords &&
         a.fractions == b.fractions && a.label_power_dbm == b.label_power_dbm &&
         a.seed == b.seed && a.has_rates == b.has_rates;
}
inline bool operator==(const Dataset& a, const Dataset& b) {
  return a.meta == b.meta && a.samples == b.samples;
}

/// Synthesizes one labelled sample from its own channel and noise streams.
inline Sample make_sample(const Observer& obs, const Codebook& cb, double label_power_dbm,
                          std::uint64_t seed, std::uint64_t index) {
  Rng ch_rng = make_stream(seed, Stream::channel, index);
  Rng noise_rng = make_stream(seed, Stream::uplink_noise, index);
  const ChannelPair ch = sample_channels(obs.config(), ch_rng);
  const double p = dbm_to_watts(label_power_dbm);

  Sample s;
  s.features = obs.observe(ch, p, noise_rng);
  const SearchOutcome es =
      exhaustive_search(ch, cb, p, obs.config().noise_watts(), obs.options().delta_db);
  s.best_index = es.best_index;
  s.labels.assign(es.label_set.begin(), es.label_set.end());
  s.rates.assign(es.rates.begin(), es.rates.end());
  return s;
}

/// Generates `count` samples; sample i depends only on (seed, i), so any
/// thread count gives identical output.
inline Dataset generate_dataset(const SystemConfig& cfg, std::size_t count, double label_power_dbm,
                                std::uint64_t seed, const ObservationOptions& opts = {},
                                unsigned threads = 1) {
  if (count < 1) throw std::invalid_argument("generate_dataset: count must be >= 1");
  const Observer obs(cfg, opts, seed);
  const Codebook cb = build_codebook(cfg, opts.codebook);

  Dataset d;
  d.meta.config = cfg;
  d.meta.options = opts;
  d.meta.pilot_len = cfg.pilot_len;
  d.meta.feature_dim = obs.feature_dim();
  d.meta.num_codewords = static_cast<int>(cb.size());
  d.meta.label_power_dbm = label_power_dbm;
  d.meta.seed = seed;
  d.samples.resize(count);

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      d.samples[i] = make_sample(obs, cb, label_power_dbm, seed, i);
  };
  if (threads == 1) {
    work(0, count);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk, e = std::min(count, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
  }
  return d;
}

struct Splits {
  Dataset train, val, test;
};

/// Order-preserving partition; validation and test sizes are floored, the
/// remainder goes to training.
inline Splits split(const Dataset& d, std::array<double, 3> fractions = {0.8, 0.1, 0.1}) {
  const double sum = fractions[0] + fractions[1] + fractions[2];
  if (fractions[0] <= 0.0 || fractions[1] <= 0.0 || fractions[2] <= 0.0 ||
      std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("split: fractions must be positive and sum to 1");
  const std::size_t n = d.size();
  const auto n_val = static_cast<std::size_t>(std::floor(n * fractions[1] + 1e-9));
  const auto n_test = static_cast<std::size_t>(std::floor(n * fractions[2] + 1e-9));
  if (n_val + n_test > n) throw std::invalid_argument("split: dataset too small");
  const std::size_t n_train = n - n_val - n_test;

  Splits s;
  for (Dataset* part : {&s.train, &s.val, &s.test}) {
    part->meta = d.meta;
    part->meta.fractions = fractions;
  }
  auto it = d.samples.begin();
  s.train.samples.assign(it, it + n_train);
  s.val.samples.assign(it + n_train, it + n_train + n_val);
  s.test.samples.assign(it + n_train + n_val, d.samples.end());
  return s;
}

// Files: meta.json, features.f32le (sample-major, then step-major, D floats
// per step), labels.u8 (Q bytes per sample), rates.f32le (optional, Q floats
// per sample). All binary payloads little-endian.
inline void save_dataset(const Dataset& d, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto& m = d.meta;
  const std::size_t n = d.size();
  const std::size_t step_floats = static_cast<std::size_t>(m.feature_dim) * m.pilot_len;

  std::vector<float> features;
  std::vector<std::uint8_t> labels;
  std::vector<float> rates;
  std::vector<int> best;
  features.reserve(n * step_floats);
  labels.reserve(n * m.num_codewords);
  for (const Sample& s : d.samples) {
    if (s.features.dim() != m.feature_dim || s.features.length() != m.pilot_len ||
        s.labels.size() != static_cast<std::size_t>(m.num_codewords))
      throw ConsistencyError("save_dataset: sample dimensions disagree with metadata");
    features.insert(features.end(), s.features.steps.data(),
                    s.features.steps.data() + s.features.steps.size());
    labels.insert(labels.end(), s.labels.begin(), s.labels.end());
    if (m.has_rates) rates.insert(rates.end(), s.rates.begin(), s.rates.end());
    best.push_back(s.best_index);
  }

  json meta{{"format", "rispre-dataset"},
            {"version", kDatasetFormatVersion},
            {"config", m.config},
            {"options", m.options},
            {"dims", {{"pilot_len", m.pilot_len}, {"feature_dim", m.feature_dim},
                      {"num_codewords", m.num_codewords}}},
            {"count", n},
            {"fractions", m.fractions},
            {"label_power_dbm", m.label_power_dbm},
            {"seed", m.seed},
            {"has_rates", m.has_rates},
            {"best_index", best}};
  std::ofstream(dir / "meta.json") << meta.dump(1) << '\n';
  write_le_file(dir / "features.f32le", features);
  write_le_file(dir / "labels.u8", labels);
  if (m.has_rates) write_le_file(dir / "rates.f32le", rates);
}

inline Dataset load_dataset(const std::filesystem::path& dir) {
  std::ifstream in(dir / "meta.json");
  if (!in) throw FormatError("load_dataset: missing meta.json in " + dir.string());
  json meta;
  try {
    meta = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("load_dataset: meta.json is not valid JSON: ") + e.what());
  }
  if (!meta.is_object() || meta.value("format", "") != "rispre-dataset")
    throw FormatError("load_dataset: not a rispre dataset");
  if (meta.value("version", -1) != kDatasetFormatVersion)
    throw VersionError("load_dataset: unsupported version " + meta.value("version", json()).dump());

  Dataset d;
  auto& m = d.meta;
  m.config = meta.at("config").get<SystemConfig>();
  m.options = meta.at("options").get<ObservationOptions>();
  m.pilot_len = meta.at("dims").at("pilot_len");
  m.feature_dim = meta.at("dims").at("feature_dim");
  m.num_codewords = meta.at("dims").at("num_codewords");
  m.fractions = meta.at("fractions");
  m.label_power_dbm = meta.at("label_power_dbm");
  m.seed = meta.at("seed");
  m.has_rates = meta.at("has_rates");
  const auto n = meta.at("count").get<std::size_t>();
  const auto best = meta.at("best_index").get<std::vector<int>>();

  if (m.pilot_len != m.config.pilot_len ||
      m.feature_dim != rispre::feature_dim(m.config.n_tx, m.config.n_ris, m.options.features) ||
      m.num_codewords != m.config.n_h * m.config.n_v || best.size() != n)
    throw ConsistencyError("load_dataset: metadata dimensions are inconsistent");

  const std::size_t step_floats = static_cast<std::size_t>(m.feature_dim) * m.pilot_len;
  const std::size_t q = m.num_codewords;
  const auto features = read_le_file<float>(dir / "features.f32le");
  const auto labels = read_le_file<std::uint8_t>(dir / "labels.u8");
  std::vector<float> rates;
  if (m.has_rates) rates = read_le_file<float>(dir / "rates.f32le");
  auto check = [&](std::size_t got, std::size_t want, const char* what) {
    if (got < want) throw TruncatedError(std::string("load_dataset: truncated ") + what);
    if (got > want) throw ConsistencyError(std::string("load_dataset: oversized ") + what);
  };
  check(features.size(), n * step_floats, "features.f32le");
  check(labels.size(), n * q, "labels.u8");
  if (m.has_rates) check(rates.size(), n * q, "rates.f32le");

  d.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Sample& s = d.samples[i];
    s.features.steps = Eigen::Map<const Eigen::MatrixXf>(features.data() + i * step_floats,
                                                         m.feature_dim, m.pilot_len);
    s.labels.assign(labels.begin() + i * q, labels.begin() + (i + 1) * q);
    if (m.has_rates) s.rates.assign(rates.begin() + i * q, rates.begin() + (i + 1) * q);
    s.best_index = best[i];
    if (s.best_index < 0 || static_cast<std::size_t>(s.best_index) >= q)
      throw ConsistencyError("load_dataset: best_index out of range");
  }
  return d;
}

}  // namespace rispre
