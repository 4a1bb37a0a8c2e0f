#pragma once

#include <cmath>
#include <cstdint>

#include "network.hpp"

namespace rispre::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  Tensors m;
  Tensors v;
  std::int64_t step = 0;

  static AdamState for_params(const Tensors& w) { return {zeros_like(w), zeros_like(w), 0}; }
};

/// Bias-corrected Adam update applied in place.
inline void adam_step(Tensors& w, const Tensors& grads, AdamState& state, double lr,
                      const AdamConfig& cfg = {}) {
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for_each_tensor(
      [&](const char*, Mat& p, const Mat& g, Mat& m, Mat& v) {
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseAbs2();
        p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.epsilon);
      },
      w, grads, state.m, state.v);
}

}  // namespace rispre::nn
