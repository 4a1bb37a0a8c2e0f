#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "../config.hpp"
#include "../pilots.hpp"
#include "../rng.hpp"

namespace rispre::nn {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

enum class Head {
  multi_label,   // sigmoid outputs, binary cross-entropy with complement term
  literal_ce,    // sigmoid outputs, -sum t ln y only
  single_label,  // softmax outputs, categorical cross-entropy on the best codeword
};

inline const char* to_string(Head h) {
  switch (h) {
    case Head::multi_label: return "multi-label";
    case Head::literal_ce: return "literal-ce";
    case Head::single_label: return "single-label";
  }
  return "?";
}

inline Head head_from_string(const std::string& s) {
  if (s == "multi-label") return Head::multi_label;
  if (s == "literal-ce") return Head::literal_ce;
  if (s == "single-label") return Head::single_label;
  throw std::invalid_argument("unknown head '" + s + "'");
}

struct Architecture {
  int input_dim = 0;
  int lstm_hidden = 140;
  int dense1 = 200;
  int dense2 = 100;
  int outputs = 64;
  double leaky_slope = 0.01;
  double bn_momentum = 0.9;
  double bn_eps = 1e-5;
  Head head = Head::multi_label;

  void validate() const {
    if (input_dim < 1 || lstm_hidden < 1 || dense1 < 1 || dense2 < 1 || outputs < 1)
      throw std::invalid_argument("Architecture: all widths must be >= 1");
  }
};

inline void to_json(json& j, const Architecture& a) {
  j = json{{"input_dim", a.input_dim},     {"lstm_hidden", a.lstm_hidden},
           {"dense1", a.dense1},           {"dense2", a.dense2},
           {"outputs", a.outputs},         {"leaky_slope", a.leaky_slope},
           {"bn_momentum", a.bn_momentum}, {"bn_eps", a.bn_eps},
           {"head", to_string(a.head)}};
}

inline void from_json(const json& j, Architecture& a) {
  rispre::detail::reject_unknown_keys(j,
                                      {"input_dim", "lstm_hidden", "dense1", "dense2", "outputs",
                                       "leaky_slope", "bn_momentum", "bn_eps", "head"},
                                      "Architecture");
  using rispre::detail::read_opt;
  read_opt(j, "input_dim", a.input_dim);
  read_opt(j, "lstm_hidden", a.lstm_hidden);
  read_opt(j, "dense1", a.dense1);
  read_opt(j, "dense2", a.dense2);
  read_opt(j, "outputs", a.outputs);
  read_opt(j, "leaky_slope", a.leaky_slope);
  read_opt(j, "bn_momentum", a.bn_momentum);
  read_opt(j, "bn_eps", a.bn_eps);
  if (j.contains("head")) a.head = head_from_string(j.at("head"));
}

/// Learnable tensors. Biases and batch-norm affine terms are n x 1 matrices so
/// every tensor can be visited uniformly. LSTM gate blocks are stacked in the
/// order input, forget, cell, output.
struct Tensors {
  Mat lstm1_w, lstm1_u, lstm1_b;
  Mat lstm2_w, lstm2_u, lstm2_b;
  Mat dense1_w, dense1_b, bn1_gamma, bn1_beta;
  Mat dense2_w, dense2_b, bn2_gamma, bn2_beta;
  Mat out_w, out_b;
};

/// Calls f(name, a.x, b.x, ...) for every tensor, always in the same order.
template <typename F, typename... Ts>
void for_each_tensor(F&& f, Ts&... ts) {
  f("lstm1.w", ts.lstm1_w...);
  f("lstm1.u", ts.lstm1_u...);
  f("lstm1.b", ts.lstm1_b...);
  f("lstm2.w", ts.lstm2_w...);
  f("lstm2.u", ts.lstm2_u...);
  f("lstm2.b", ts.lstm2_b...);
  f("dense1.w", ts.dense1_w...);
  f("dense1.b", ts.dense1_b...);
  f("bn1.gamma", ts.bn1_gamma...);
  f("bn1.beta", ts.bn1_beta...);
  f("dense2.w", ts.dense2_w...);
  f("dense2.b", ts.dense2_b...);
  f("bn2.gamma", ts.bn2_gamma...);
  f("bn2.beta", ts.bn2_beta...);
  f("out.w", ts.out_w...);
  f("out.b", ts.out_b...);
}

inline Tensors zeros_like(const Tensors& t) {
  Tensors z = t;
  for_each_tensor([](const char*, Mat& m) { m.setZero(); }, z);
  return z;
}

struct RunningStats {
  Vec mean;
  Vec var;
};

struct ModelParams {
  Architecture arch;
  Tensors w;
  RunningStats bn1, bn2;
  bool bn_ready = false;
  // Per-feature standardization of network inputs, fitted on training data.
  Vec input_mean;
  Vec input_scale;
};

inline std::size_t parameter_count(const ModelParams& p) {
  std::size_t n = 0;
  for_each_tensor([&](const char*, const Mat& m) { n += static_cast<std::size_t>(m.size()); }, p.w);
  return n;
}

/// Uniform +-1/sqrt(fan_in) weights, forget-gate bias +1, unit batch-norm scale.
inline ModelParams init_params(const Architecture& arch, std::uint64_t seed) {
  arch.validate();
  Rng rng = make_stream(seed, Stream::init);
  auto uniform = [&](int rows, int cols, int fan_in) {
    std::uniform_real_distribution<double> u(-1.0 / std::sqrt(fan_in), 1.0 / std::sqrt(fan_in));
    Mat m(rows, cols);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = u(rng);
    return m;
  };
  const int h = arch.lstm_hidden;
  ModelParams p;
  p.arch = arch;
  auto& w = p.w;
  w.lstm1_w = uniform(4 * h, arch.input_dim, arch.input_dim);
  w.lstm1_u = uniform(4 * h, h, h);
  w.lstm1_b = Mat::Zero(4 * h, 1);
  w.lstm1_b.block(h, 0, h, 1).setOnes();
  w.lstm2_w = uniform(4 * h, h, h);
  w.lstm2_u = uniform(4 * h, h, h);
  w.lstm2_b = Mat::Zero(4 * h, 1);
  w.lstm2_b.block(h, 0, h, 1).setOnes();
  w.dense1_w = uniform(arch.dense1, h, h);
  w.dense1_b = Mat::Zero(arch.dense1, 1);
  w.bn1_gamma = Mat::Ones(arch.dense1, 1);
  w.bn1_beta = Mat::Zero(arch.dense1, 1);
  w.dense2_w = uniform(arch.dense2, arch.dense1, arch.dense1);
  w.dense2_b = Mat::Zero(arch.dense2, 1);
  w.bn2_gamma = Mat::Ones(arch.dense2, 1);
  w.bn2_beta = Mat::Zero(arch.dense2, 1);
  w.out_w = uniform(arch.outputs, arch.dense2, arch.dense2);
  w.out_b = Mat::Zero(arch.outputs, 1);
  p.bn1 = {Vec::Zero(arch.dense1), Vec::Ones(arch.dense1)};
  p.bn2 = {Vec::Zero(arch.dense2), Vec::Ones(arch.dense2)};
  p.input_mean = Vec::Zero(arch.input_dim);
  p.input_scale = Vec::Ones(arch.input_dim);
  return p;
}

inline double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// One LSTM step for a batch (columns). Gates i, f, o use the logistic
/// function and the candidate uses tanh; c' = f c + i g, h' = o tanh(c').
struct LstmStep {
  Mat i, f, g, o, c, tanh_c, h;
};

inline LstmStep lstm_cell_forward(const Mat& x, const Mat& h_prev, const Mat& c_prev, const Mat& w,
                                  const Mat& u, const Mat& b) {
  const Eigen::Index hid = u.cols();
  if (w.rows() != 4 * hid || u.rows() != 4 * hid || b.rows() != 4 * hid || w.cols() != x.rows() ||
      h_prev.rows() != hid || c_prev.rows() != hid || h_prev.cols() != x.cols() ||
      c_prev.cols() != x.cols())
    throw std::invalid_argument("lstm_cell_forward: dimension mismatch");
  Mat z = w * x + u * h_prev;
  z.colwise() += b.col(0);
  LstmStep s;
  s.i = z.topRows(hid).unaryExpr(&logistic);
  s.f = z.middleRows(hid, hid).unaryExpr(&logistic);
  s.g = z.middleRows(2 * hid, hid).array().tanh();
  s.o = z.bottomRows(hid).unaryExpr(&logistic);
  s.c = s.f.cwiseProduct(c_prev) + s.i.cwiseProduct(s.g);
  s.tanh_c = s.c.array().tanh();
  s.h = s.o.cwiseProduct(s.tanh_c);
  return s;
}

enum class Mode { train, infer };

struct BatchNormCache {
  Mat xhat;
  Vec inv_std;
  Vec batch_mean, batch_var;
};

/// Activations retained by a train-mode forward pass for backpropagation.
struct ForwardCache {
  int batch = 0;
  std::vector<Mat> inputs;  // normalized input per step, D x B
  std::vector<LstmStep> l1, l2;
  Mat d1_pre, d1_act;  // dense1 output before / after bn + leaky
  Mat d2_pre, d2_act;
  BatchNormCache bn1, bn2;
  Mat bn1_out, bn2_out;  // batch-norm outputs feeding the activation
  Mat logits;
  Mat probs;
  bool valid = false;
};

/// Floating-point operations executed by a forward pass (multiply-add = 2).
struct FlopCounter {
  double flops = 0.0;
  void matmul(Eigen::Index m, Eigen::Index k, Eigen::Index n) {
    flops += 2.0 * static_cast<double>(m) * static_cast<double>(k) * static_cast<double>(n);
  }
  void elementwise(Eigen::Index count, double per = 1.0) {
    flops += per * static_cast<double>(count);
  }
};

namespace detail {

inline Mat leaky(const Mat& x, double slope) {
  return x.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
}

inline Mat batch_norm_forward(const Mat& x, const Mat& gamma, const Mat& beta,
                              RunningStats& running, Mode mode, double eps, double momentum,
                              bool update_running, BatchNormCache* cache) {
  const double b = static_cast<double>(x.cols());
  Vec mean, var;
  if (mode == Mode::train) {
    mean = x.rowwise().mean();
    var = (x.colwise() - mean).array().square().rowwise().sum() / b;
    if (update_running) {
      const Vec unbiased = x.cols() > 1 ? Vec(var * (b / (b - 1.0))) : var;
      running.mean = momentum * running.mean + (1.0 - momentum) * mean;
      running.var = momentum * running.var + (1.0 - momentum) * unbiased;
    }
  } else {
    mean = running.mean;
    var = running.var;
  }
  const Vec inv_std = (var.array() + eps).rsqrt();
  Mat xhat = (x.colwise() - mean).array().colwise() * inv_std.array();
  Mat y = (xhat.array().colwise() * gamma.col(0).array()).colwise() + beta.col(0).array();
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = inv_std;
    cache->batch_mean = mean;
    cache->batch_var = var;
  }
  return y;
}

}  // namespace detail

/// Stacks a batch of sequences into per-step D x B matrices after input standardization.
inline std::vector<Mat> stack_inputs(std::span<const FeatureSequence* const> batch,
                                     const ModelParams& p) {
  if (batch.empty()) throw std::invalid_argument("model_forward: empty batch");
  const Eigen::Index d = p.arch.input_dim;
  const Eigen::Index k = batch.front()->length();
  std::vector<Mat> xs(static_cast<std::size_t>(k), Mat(d, static_cast<Eigen::Index>(batch.size())));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& f = batch[b]->steps;
    if (f.rows() != d || f.cols() != k)
      throw std::invalid_argument("model_forward: feature dimensions do not match the model");
    for (Eigen::Index t = 0; t < k; ++t)
      xs[t].col(static_cast<Eigen::Index>(b)) =
          ((f.col(t).cast<double>() - p.input_mean).array() * p.input_scale.array()).matrix();
  }
  return xs;
}

struct ForwardOptions {
  Mode mode = Mode::infer;
  bool update_running = false;  // train mode only
  ForwardCache* cache = nullptr;
  FlopCounter* flops = nullptr;
};

/// Runs lstm1 -> lstm2 -> dense1 -> bn1 -> leaky -> dense2 -> bn2 -> leaky ->
/// out -> sigmoid (softmax for the single-label head). Returns Q x B probabilities.
inline Mat model_forward(std::span<const FeatureSequence* const> batch, ModelParams& p,
                         const ForwardOptions& opt) {
  if (opt.mode == Mode::infer && !p.bn_ready)
    throw std::logic_error("model_forward: batch-norm running statistics are not initialized");
  const auto& a = p.arch;
  const auto& w = p.w;
  std::vector<Mat> xs = stack_inputs(batch, p);
  const Eigen::Index bsz = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index h = a.lstm_hidden;
  FlopCounter* fc = opt.flops;

  auto run_layer = [&](const std::vector<Mat>& in, const Mat& lw, const Mat& lu, const Mat& lb,
                       std::vector<LstmStep>* keep) {
    Mat hs = Mat::Zero(h, bsz), cs = Mat::Zero(h, bsz);
    std::vector<Mat> outs;
    outs.reserve(in.size());
    for (const Mat& x : in) {
      LstmStep s = lstm_cell_forward(x, hs, cs, lw, lu, lb);
      if (fc) {
        fc->matmul(4 * h, x.rows(), bsz);
        fc->matmul(4 * h, h, bsz);
        fc->elementwise(4 * h * bsz, 2.0);  // bias add + gate nonlinearity
        fc->elementwise(h * bsz, 5.0);      // cell update, tanh, output gate
      }
      hs = s.h;
      cs = s.c;
      outs.push_back(s.h);
      if (keep) keep->push_back(std::move(s));
    }
    return outs;
  };

  ForwardCache* cache = opt.cache;
  if (cache) {
    *cache = ForwardCache{};
    cache->batch = static_cast<int>(bsz);
  }
  std::vector<Mat> h1 = run_layer(xs, w.lstm1_w, w.lstm1_u, w.lstm1_b, cache ? &cache->l1 : nullptr);
  std::vector<Mat> h2 = run_layer(h1, w.lstm2_w, w.lstm2_u, w.lstm2_b, cache ? &cache->l2 : nullptr);
  const Mat& last = h2.back();

  auto dense_block = [&](const Mat& in, const Mat& dw, const Mat& db, const Mat& gamma,
                         const Mat& beta, RunningStats& rs, Mat* pre, BatchNormCache* bnc,
                         Mat* bn_out) {
    Mat z = dw * in;
    z.colwise() += db.col(0);
    if (fc) {
      fc->matmul(dw.rows(), dw.cols(), bsz);
      fc->elementwise(z.size(), 5.0);  // bias, normalize, scale/shift, activation
    }
    Mat y = detail::batch_norm_forward(z, gamma, beta, rs, opt.mode, a.bn_eps, a.bn_momentum,
                                       opt.update_running, bnc);
    Mat act = detail::leaky(y, a.leaky_slope);
    if (pre) *pre = std::move(z);
    if (bn_out) *bn_out = std::move(y);
    return act;
  };

  Mat a1 = dense_block(last, w.dense1_w, w.dense1_b, w.bn1_gamma, w.bn1_beta, p.bn1,
                       cache ? &cache->d1_pre : nullptr, cache ? &cache->bn1 : nullptr,
                       cache ? &cache->bn1_out : nullptr);
  Mat a2 = dense_block(a1, w.dense2_w, w.dense2_b, w.bn2_gamma, w.bn2_beta, p.bn2,
                       cache ? &cache->d2_pre : nullptr, cache ? &cache->bn2 : nullptr,
                       cache ? &cache->bn2_out : nullptr);
  if (opt.mode == Mode::train && opt.update_running) p.bn_ready = true;

  Mat logits = w.out_w * a2;
  logits.colwise() += w.out_b.col(0);
  if (fc) {
    fc->matmul(w.out_w.rows(), w.out_w.cols(), bsz);
    fc->elementwise(logits.size(), 2.0);
  }
  Mat probs(logits.rows(), logits.cols());
  if (a.head == Head::single_label) {
    for (Eigen::Index b = 0; b < bsz; ++b) {
      const double mx = logits.col(b).maxCoeff();
      const Vec e = (logits.col(b).array() - mx).exp();
      probs.col(b) = e / e.sum();
    }
  } else {
    probs = logits.unaryExpr(&logistic);
  }
  if (cache) {
    cache->inputs = std::move(xs);
    cache->d1_act = std::move(a1);
    cache->d2_act = std::move(a2);
    cache->logits = std::move(logits);
    cache->probs = probs;
    cache->valid = true;
  }
  return probs;
}

inline constexpr double kProbClamp = 1e-12;

/// Mean over the batch of the per-sample loss. Targets are multi-hot Q x B
/// (for the single-label head, a one-hot of the best codeword).
inline double loss(const Mat& probs, const Mat& targets, Head head = Head::multi_label) {
  if (probs.rows() != targets.rows() || probs.cols() != targets.cols())
    throw std::invalid_argument("loss: shape mismatch");
  const double b = static_cast<double>(probs.cols());
  double total = 0.0;
  for (Eigen::Index c = 0; c < probs.cols(); ++c)
    for (Eigen::Index q = 0; q < probs.rows(); ++q) {
      const double y = std::clamp(probs(q, c), kProbClamp, 1.0 - kProbClamp);
      const double t = targets(q, c);
      total -= t * std::log(y);
      if (head == Head::multi_label) total -= (1.0 - t) * std::log(1.0 - y);
    }
  return total / b;
}

/// dL/d(logits) for the given head, Q x B.
inline Mat loss_grad_logits(const Mat& probs, const Mat& targets, Head head) {
  const double b = static_cast<double>(probs.cols());
  switch (head) {
    case Head::multi_label:
    case Head::single_label:
      return (probs - targets) / b;
    case Head::literal_ce:
      return -(targets.array() * (1.0 - probs.array())).matrix() / b;
  }
  return {};
}

namespace detail {

inline Mat batch_norm_backward(const Mat& dy, const Mat& gamma, const BatchNormCache& c,
                               Mat& dgamma, Mat& dbeta) {
  const double b = static_cast<double>(dy.cols());
  dgamma = dy.cwiseProduct(c.xhat).rowwise().sum();
  dbeta = dy.rowwise().sum();
  const Mat dxhat = dy.array().colwise() * gamma.col(0).array();
  const Vec sum_dxhat = dxhat.rowwise().sum();
  const Vec sum_dxhat_xhat = dxhat.cwiseProduct(c.xhat).rowwise().sum();
  Mat dx = (b * dxhat).colwise() - sum_dxhat;
  dx -= (c.xhat.array().colwise() * sum_dxhat_xhat.array()).matrix();
  return (dx.array().colwise() * (c.inv_std.array() / b)).matrix();
}

inline Mat leaky_backward(const Mat& dy, const Mat& pre, double slope) {
  return dy.binaryExpr(pre, [slope](double g, double v) { return v > 0.0 ? g : slope * g; });
}

// BPTT through one LSTM layer; dh_top[k] is the gradient arriving at h_k
// from above (may be empty for steps with no consumer). Returns dL/dx_k.
inline std::vector<Mat> lstm_backward(const std::vector<LstmStep>& steps,
                                      const std::vector<Mat>& inputs,
                                      const std::vector<Mat>& dh_top, const Mat& w, const Mat& u,
                                      Mat& dw, Mat& du, Mat& db, bool need_dx) {
  const Eigen::Index hid = u.cols();
  const Eigen::Index bsz = inputs.front().cols();
  const std::size_t k = steps.size();
  Mat dh_rec = Mat::Zero(hid, bsz), dc_next = Mat::Zero(hid, bsz);
  const Mat zeros = Mat::Zero(hid, bsz);
  std::vector<Mat> dx(need_dx ? k : 0);
  Mat dz(4 * hid, bsz);
  for (std::size_t t = k; t-- > 0;) {
    const LstmStep& s = steps[t];
    const Mat& h_prev = t > 0 ? steps[t - 1].h : zeros;
    const Mat& c_prev = t > 0 ? steps[t - 1].c : zeros;
    Mat dh = dh_rec;
    if (dh_top[t].size() != 0) dh += dh_top[t];
    const Mat d_o = dh.cwiseProduct(s.tanh_c);
    const Mat dc = dh.cwiseProduct(s.o).cwiseProduct((1.0 - s.tanh_c.array().square()).matrix()) +
                   dc_next;
    const Mat di = dc.cwiseProduct(s.g);
    const Mat dg = dc.cwiseProduct(s.i);
    const Mat df = dc.cwiseProduct(c_prev);
    dc_next = dc.cwiseProduct(s.f);
    dz.topRows(hid) = di.array() * s.i.array() * (1.0 - s.i.array());
    dz.middleRows(hid, hid) = df.array() * s.f.array() * (1.0 - s.f.array());
    dz.middleRows(2 * hid, hid) = dg.array() * (1.0 - s.g.array().square());
    dz.bottomRows(hid) = d_o.array() * s.o.array() * (1.0 - s.o.array());
    dw.noalias() += dz * inputs[t].transpose();
    du.noalias() += dz * h_prev.transpose();
    db += dz.rowwise().sum();
    if (need_dx) dx[t] = w.transpose() * dz;
    dh_rec = u.transpose() * dz;
  }
  return dx;
}

}  // namespace detail

/// Gradients of the mean batch loss with respect to every learnable tensor.
inline Tensors backward(const ForwardCache& cache, const ModelParams& p, const Mat& targets) {
  if (!cache.valid || cache.probs.cols() != targets.cols() || cache.probs.rows() != targets.rows())
    throw std::logic_error("backward: cache does not belong to this batch");
  const auto& w = p.w;
  const auto& a = p.arch;
  Tensors g = zeros_like(w);

  const Mat dlogits = loss_grad_logits(cache.probs, targets, a.head);
  g.out_w = dlogits * cache.d2_act.transpose();
  g.out_b = dlogits.rowwise().sum();
  Mat d = w.out_w.transpose() * dlogits;

  d = detail::leaky_backward(d, cache.bn2_out, a.leaky_slope);
  d = detail::batch_norm_backward(d, w.bn2_gamma, cache.bn2, g.bn2_gamma, g.bn2_beta);
  g.dense2_w = d * cache.d1_act.transpose();
  g.dense2_b = d.rowwise().sum();
  d = w.dense2_w.transpose() * d;

  d = detail::leaky_backward(d, cache.bn1_out, a.leaky_slope);
  d = detail::batch_norm_backward(d, w.bn1_gamma, cache.bn1, g.bn1_gamma, g.bn1_beta);
  g.dense1_w = d * cache.l2.back().h.transpose();
  g.dense1_b = d.rowwise().sum();
  d = w.dense1_w.transpose() * d;

  const std::size_t k = cache.l2.size();
  std::vector<Mat> dh_top(k);
  dh_top.back() = d;
  std::vector<Mat> h1(k);
  for (std::size_t t = 0; t < k; ++t) h1[t] = cache.l1[t].h;
  const std::vector<Mat> dh1 = detail::lstm_backward(cache.l2, h1, dh_top, w.lstm2_w, w.lstm2_u,
                                                     g.lstm2_w, g.lstm2_u, g.lstm2_b, true);
  detail::lstm_backward(cache.l1, cache.inputs, dh1, w.lstm1_w, w.lstm1_u, g.lstm1_w, g.lstm1_u,
                        g.lstm1_b, false);
  return g;
}

/// Deployment rule: the most probable codeword among those above threshold,
/// falling back to the global argmax. Ties go to the smaller index.
inline int decode_codeword(std::span<const double> probs, double threshold) {
  if (probs.empty()) throw std::invalid_argument("decode_codeword: empty probability vector");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("decode_codeword: threshold must lie in (0, 1)");
  int best_above = -1;
  int best = 0;
  for (std::size_t q = 0; q < probs.size(); ++q) {
    if (probs[q] > probs[best]) best = static_cast<int>(q);
    if (probs[q] > threshold && (best_above < 0 || probs[q] > probs[best_above]))
      best_above = static_cast<int>(q);
  }
  return best_above >= 0 ? best_above : best;
}

}  // namespace rispre::nn
