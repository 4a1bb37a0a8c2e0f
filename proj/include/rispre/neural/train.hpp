#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "../dataset.hpp"
#include "adam.hpp"
#include "network.hpp"

namespace rispre::nn {

struct TrainConfig {
  int batch_size = 2000;
  double learning_rate = 1e-2;
  int max_epochs = 100;
  int patience = 2;
  double sigmoid_threshold = 0.5;
  AdamConfig adam;
  std::uint64_t seed = 0;

  void validate() const {
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (patience < 1) throw std::invalid_argument("TrainConfig: patience must be >= 1");
    if (max_epochs < 0) throw std::invalid_argument("TrainConfig: max_epochs must be >= 0");
    if (!(sigmoid_threshold > 0.0 && sigmoid_threshold < 1.0))
      throw std::invalid_argument("TrainConfig: sigmoid_threshold must lie in (0, 1)");
  }
};

inline void to_json(json& j, const TrainConfig& t) {
  j = json{{"batch_size", t.batch_size},
           {"learning_rate", t.learning_rate},
           {"max_epochs", t.max_epochs},
           {"patience", t.patience},
           {"sigmoid_threshold", t.sigmoid_threshold},
           {"beta1", t.adam.beta1},
           {"beta2", t.adam.beta2},
           {"epsilon", t.adam.epsilon},
           {"seed", t.seed}};
}

inline void from_json(const json& j, TrainConfig& t) {
  rispre::detail::reject_unknown_keys(j,
                                      {"batch_size", "learning_rate", "max_epochs", "patience",
                                       "sigmoid_threshold", "beta1", "beta2", "epsilon", "seed"},
                                      "TrainConfig");
  using rispre::detail::read_opt;
  read_opt(j, "batch_size", t.batch_size);
  read_opt(j, "learning_rate", t.learning_rate);
  read_opt(j, "max_epochs", t.max_epochs);
  read_opt(j, "patience", t.patience);
  read_opt(j, "sigmoid_threshold", t.sigmoid_threshold);
  read_opt(j, "beta1", t.adam.beta1);
  read_opt(j, "beta2", t.adam.beta2);
  read_opt(j, "epsilon", t.adam.epsilon);
  read_opt(j, "seed", t.seed);
  t.validate();
}

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  int best_epoch = -1;
};

/// Fits per-feature standardization on the training inputs (all steps pooled).
inline void fit_input_normalization(ModelParams& p, const Dataset& train) {
  const Eigen::Index d = p.arch.input_dim;
  Vec sum = Vec::Zero(d), sq = Vec::Zero(d);
  double count = 0.0;
  for (const Sample& s : train.samples) {
    if (s.features.dim() != d)
      throw std::invalid_argument("fit_input_normalization: feature dimension mismatch");
    const Mat f = s.features.steps.cast<double>();
    sum += f.rowwise().sum();
    sq += f.array().square().matrix().rowwise().sum();
    count += static_cast<double>(f.cols());
  }
  if (count == 0.0) return;
  p.input_mean = sum / count;
  const Vec var = (sq / count - p.input_mean.cwiseAbs2()).cwiseMax(0.0);
  p.input_scale = var.unaryExpr([](double v) { return v > 0.0 ? 1.0 / std::sqrt(v) : 1.0; });
}

inline Mat targets_for(std::span<const Sample* const> batch, int q, Head head) {
  Mat t = Mat::Zero(q, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Sample& s = *batch[b];
    if (s.labels.size() != static_cast<std::size_t>(q))
      throw std::invalid_argument("targets_for: label width does not match model outputs");
    if (head == Head::single_label) {
      t(s.best_index, static_cast<Eigen::Index>(b)) = 1.0;
    } else {
      for (int i = 0; i < q; ++i) t(i, static_cast<Eigen::Index>(b)) = s.labels[i] ? 1.0 : 0.0;
    }
  }
  return t;
}

/// Inference-mode probabilities for every sample, Q x N. Evaluated in chunks;
/// the result does not depend on the chunk size.
inline Mat predict(ModelParams& p, const std::vector<Sample>& samples, std::size_t chunk = 512) {
  Mat out(p.arch.outputs, static_cast<Eigen::Index>(samples.size()));
  std::vector<const FeatureSequence*> ptrs;
  for (std::size_t b = 0; b < samples.size(); b += chunk) {
    const std::size_t e = std::min(samples.size(), b + chunk);
    ptrs.clear();
    for (std::size_t i = b; i < e; ++i) ptrs.push_back(&samples[i].features);
    out.middleCols(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(e - b)) =
        model_forward(ptrs, p, {.mode = Mode::infer});
  }
  return out;
}

inline double evaluate_loss(ModelParams& p, const Dataset& d) {
  if (d.samples.empty()) return 0.0;
  const Mat probs = predict(p, d.samples);
  std::vector<const Sample*> ptrs;
  for (const Sample& s : d.samples) ptrs.push_back(&s);
  return loss(probs, targets_for(ptrs, p.arch.outputs, p.arch.head), p.arch.head);
}

struct TrainResult {
  ModelParams params;
  TrainHistory history;
};

/// Mini-batch Adam with seeded shuffling and early stopping on validation
/// loss. Returns the parameters of the best validation epoch.
inline TrainResult train(const Dataset& train_set, const Dataset& val_set, ModelParams init,
                         const TrainConfig& tcfg) {
  tcfg.validate();
  TrainResult res{std::move(init), {}};
  if (tcfg.max_epochs == 0) return res;
  if (train_set.samples.empty() || val_set.samples.empty())
    throw std::invalid_argument("train: empty training or validation split");
  ModelParams& p = res.params;
  for (const Dataset* d : {&train_set, &val_set})
    if (d->meta.feature_dim != p.arch.input_dim || d->meta.num_codewords != p.arch.outputs)
      throw std::invalid_argument("train: dataset dimensions do not match the model");

  AdamState adam = AdamState::for_params(p.w);
  ModelParams best = p;
  double best_val = std::numeric_limits<double>::infinity();
  int stale = 0;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<const FeatureSequence*> feats;
  std::vector<const Sample*> batch;
  ForwardCache cache;

  for (int epoch = 0; epoch < tcfg.max_epochs; ++epoch) {
    Rng rng = make_stream(tcfg.seed, Stream::shuffle, static_cast<std::uint64_t>(epoch));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(order[i - 1], order[pick(rng)]);
    }
    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(tcfg.batch_size)) {
      const std::size_t e = std::min(order.size(), b + static_cast<std::size_t>(tcfg.batch_size));
      feats.clear();
      batch.clear();
      for (std::size_t i = b; i < e; ++i) {
        batch.push_back(&train_set.samples[order[i]]);
        feats.push_back(&train_set.samples[order[i]].features);
      }
      const Mat targets = targets_for(batch, p.arch.outputs, p.arch.head);
      const Mat probs =
          model_forward(feats, p, {.mode = Mode::train, .update_running = true, .cache = &cache});
      epoch_loss += loss(probs, targets, p.arch.head) * static_cast<double>(e - b);
      const Tensors grads = backward(cache, p, targets);
      adam_step(p.w, grads, adam, tcfg.learning_rate, tcfg.adam);
    }
    res.history.train_loss.push_back(epoch_loss / static_cast<double>(order.size()));
    const double val = evaluate_loss(p, val_set);
    res.history.val_loss.push_back(val);
    if (val < best_val) {
      best_val = val;
      best = p;
      res.history.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= tcfg.patience) {
      break;
    }
  }
  TrainHistory history = std::move(res.history);
  return {std::move(best), std::move(history)};
}

}  // namespace rispre::nn
