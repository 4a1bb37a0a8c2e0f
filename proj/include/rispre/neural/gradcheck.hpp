#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "network.hpp"

namespace rispre::nn {

struct GradientCheckReport {
  double max_rel_error = 0.0;
  std::string worst_tensor;
  std::vector<std::pair<std::string, double>> per_tensor;
};

/// Compares backward() against central differences of the train-mode loss for
/// every learnable entry. Error per entry: |analytic - numeric| / max(1, |analytic|).
inline GradientCheckReport gradient_check(const ModelParams& params,
                                          std::span<const FeatureSequence* const> batch,
                                          const Mat& targets, double step) {
  ModelParams p = params;
  auto loss_at = [&](ModelParams& q) {
    return loss(model_forward(batch, q, {.mode = Mode::train}), targets, q.arch.head);
  };
  ForwardCache cache;
  model_forward(batch, p, {.mode = Mode::train, .cache = &cache});
  const Tensors analytic = backward(cache, p, targets);

  GradientCheckReport rep;
  for_each_tensor(
      [&](const char* name, Mat& w, const Mat& g) {
        double worst = 0.0;
        for (Eigen::Index i = 0; i < w.size(); ++i) {
          const double saved = w.data()[i];
          w.data()[i] = saved + step;
          const double up = loss_at(p);
          w.data()[i] = saved - step;
          const double down = loss_at(p);
          w.data()[i] = saved;
          const double numeric = (up - down) / (2.0 * step);
          const double a = g.data()[i];
          worst = std::max(worst, std::abs(a - numeric) / std::max(1.0, std::abs(a)));
        }
        rep.per_tensor.emplace_back(name, worst);
        if (worst >= rep.max_rel_error) {
          rep.max_rel_error = worst;
          rep.worst_tensor = name;
        }
      },
      p.w, analytic);
  return rep;
}

}  // namespace rispre::nn
