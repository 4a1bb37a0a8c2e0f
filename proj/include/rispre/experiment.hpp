#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "dataset.hpp"
#include "neural/train.hpp"

namespace rispre {

/// Named bundle of every knob a pipeline run needs. Two profiles ship: the
/// full-size reference geometry and a desk-scale reduction.
struct ExperimentConfig {
  std::string profile = "full";
  SystemConfig system;
  ObservationOptions observation;
  nn::Architecture model;
  nn::TrainConfig train;
  double label_power_dbm = kDefaultLabelPowerDbm;
  std::size_t samples = 20000;
  std::array<double, 3> fractions{0.8, 0.1, 0.1};

  static ExperimentConfig full() {
    ExperimentConfig e;
    e.model.input_dim = feature_dim(e.system.n_tx, e.system.n_ris, e.observation.features);
    e.model.outputs = e.system.n_h * e.system.n_v;
    e.samples = 1'000'000;
    e.fractions = {0.899, 0.1, 0.001};
    return e;
  }

  static ExperimentConfig desk() {
    ExperimentConfig e;
    e.profile = "desk";
    e.system = SystemConfig::desk();
    e.model.input_dim = feature_dim(e.system.n_tx, e.system.n_ris, e.observation.features);
    e.model.outputs = e.system.n_h * e.system.n_v;
    e.model.lstm_hidden = 32;
    e.model.dense1 = 64;
    e.model.dense2 = 32;
    e.train.batch_size = 256;
    e.train.max_epochs = 60;
    e.train.patience = 2;
    e.samples = 20000;
    e.fractions = {0.9, 0.05, 0.05};
    return e;
  }

  static ExperimentConfig named(const std::string& name) {
    if (name == "full") return full();
    if (name == "desk") return desk();
    throw std::invalid_argument("unknown profile '" + name + "'");
  }

  /// Recomputes network input/output widths from the system geometry.
  void sync_dims() {
    model.input_dim = feature_dim(system.n_tx, system.n_ris, observation.features);
    model.outputs = system.n_h * system.n_v;
  }
};

inline void to_json(json& j, const ExperimentConfig& e) {
  j = json{{"profile", e.profile},     {"system", e.system},
           {"observation", e.observation}, {"model", e.model},
           {"train", e.train},         {"label_power_dbm", e.label_power_dbm},
           {"samples", e.samples},     {"fractions", e.fractions}};
}

/// Starts from the named profile (default "full") and overrides whatever the
/// document sets. Unknown keys are rejected at every level.
inline void from_json(const json& j, ExperimentConfig& e) {
  detail::reject_unknown_keys(j,
                              {"profile", "system", "observation", "model", "train",
                               "label_power_dbm", "samples", "fractions"},
                              "ExperimentConfig");
  e = ExperimentConfig::named(j.value("profile", std::string("full")));
  if (j.contains("system")) {
    json merged = e.system;
    merged.update(j.at("system"));
    if (j.at("system").contains("n_h") || j.at("system").contains("n_v"))
      if (!j.at("system").contains("n_ris")) merged.erase("n_ris");
    e.system = merged.get<SystemConfig>();
  }
  if (j.contains("observation")) {
    json merged = e.observation;
    merged.update(j.at("observation"));
    e.observation = merged.get<ObservationOptions>();
  }
  if (j.contains("model")) {
    json merged = e.model;
    merged.update(j.at("model"));
    e.model = merged.get<nn::Architecture>();
  }
  if (j.contains("train")) {
    json merged = e.train;
    merged.update(j.at("train"));
    e.train = merged.get<nn::TrainConfig>();
  }
  detail::read_opt(j, "label_power_dbm", e.label_power_dbm);
  detail::read_opt(j, "samples", e.samples);
  detail::read_opt(j, "fractions", e.fractions);
  e.sync_dims();
}

inline ExperimentConfig load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  return json::parse(in).get<ExperimentConfig>();
}

/// What an evaluator needs to reproduce a model's observation pipeline.
struct ModelContext {
  SystemConfig system;
  ObservationOptions observation;
  std::uint64_t pilot_seed = 0;
  double label_power_dbm = kDefaultLabelPowerDbm;
};

inline void to_json(json& j, const ModelContext& c) {
  j = json{{"system", c.system},
           {"observation", c.observation},
           {"pilot_seed", c.pilot_seed},
           {"label_power_dbm", c.label_power_dbm}};
}

inline void from_json(const json& j, ModelContext& c) {
  c.system = j.at("system").get<SystemConfig>();
  c.observation = j.at("observation").get<ObservationOptions>();
  c.pilot_seed = j.at("pilot_seed");
  c.label_power_dbm = j.at("label_power_dbm");
}

}  // namespace rispre
