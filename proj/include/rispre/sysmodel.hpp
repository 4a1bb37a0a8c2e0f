#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "config.hpp"
#include "rng.hpp"

namespace rispre {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;

/// ULA response [1, e^{-j theta}, ..., e^{-j (n-1) theta}]^T.
inline CVec steering_vector(int n, double theta) {
  if (n < 1) throw std::invalid_argument("steering_vector: n must be >= 1");
  CVec a(n);
  for (int m = 0; m < n; ++m) a[m] = std::polar(1.0, -static_cast<double>(m) * theta);
  return a;
}

inline CVec kron(const CVec& a, const CVec& b) {
  CVec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

/// Linear-scale large-scale gain of one hop, including the RIS gain.
inline double path_loss_linear(double exponent, double dist, const SystemConfig& cfg) {
  if (!(dist >= cfg.ref_dist))
    throw std::invalid_argument("path_loss_linear: distance below reference distance");
  const double db =
      cfg.ref_loss_db - 10.0 * exponent * std::log10(dist / cfg.ref_dist) + cfg.ris_gain_db;
  return std::pow(10.0, db / 10.0);
}

/// Phase-dependent reflection amplitude of one RIS element, in [beta_min, 1].
inline double amplitude_model(double psi, const SystemConfig& cfg) {
  const double s = (std::sin(psi - cfg.psi0) + 1.0) / 2.0;
  return (1.0 - cfg.beta_min) * std::pow(s, cfg.alpha) + cfg.beta_min;
}

struct RisConfig {
  RVec phases;
  RVec amplitudes;
  CVec response;

  Eigen::Index size() const { return response.size(); }
};

inline RisConfig ris_config_from_phases(const RVec& phases, const SystemConfig& cfg, bool ideal) {
  if (phases.size() != cfg.n_ris)
    throw std::invalid_argument("ris_config_from_phases: expected " + std::to_string(cfg.n_ris) +
                                " phases, got " + std::to_string(phases.size()));
  RisConfig r;
  r.phases = phases;
  r.amplitudes.resize(phases.size());
  r.response.resize(phases.size());
  for (Eigen::Index n = 0; n < phases.size(); ++n) {
    r.amplitudes[n] = ideal ? 1.0 : amplitude_model(phases[n], cfg);
    r.response[n] = std::polar(r.amplitudes[n], phases[n]);
  }
  return r;
}

/// BS->RIS and RIS->user channels of one realization.
struct ChannelPair {
  CMat h_t;       // N x N_t
  CMat h_r_herm;  // N_r x N
  double l_t = 0.0;
  double l_r = 0.0;
};

/// One NLOS path gain, CN(0, 1 / (L (K + 1))).
inline cplx draw_nlos_gain(double rician, int n_paths, Rng& rng) {
  const double var = 1.0 / (n_paths * (rician + 1.0));
  std::normal_distribution<double> g(0.0, std::sqrt(var / 2.0));
  const double re = g(rng);
  const double im = g(rng);
  return {re, im};
}

namespace detail {

inline cplx path_gain(int path, double rician, int n_paths, Rng& rng) {
  if (path == 0) {
    if (std::isinf(rician)) return 1.0;
    return std::sqrt(rician / (rician + 1.0));
  }
  if (std::isinf(rician)) return 0.0;
  return draw_nlos_gain(rician, n_paths, rng);
}

}  // namespace detail

/// Draws a Rician realization: one LOS path plus n_paths NLOS paths per hop.
/// Every angle is uniform on [0, 2 pi) and used directly as the steering phase.
inline ChannelPair sample_channels(const SystemConfig& cfg, Rng& rng) {
  cfg.validate();
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);

  ChannelPair ch;
  ch.l_t = path_loss_linear(cfg.pl_exp_t, cfg.dist_t, cfg);
  ch.l_r = path_loss_linear(cfg.pl_exp_r, cfg.dist_r, cfg);
  ch.h_t = CMat::Zero(cfg.n_ris, cfg.n_tx);
  ch.h_r_herm = CMat::Zero(cfg.n_rx, cfg.n_ris);

  for (int l = 0; l <= cfg.n_paths; ++l) {
    const cplx z = detail::path_gain(l, cfg.rician_t, cfg.n_paths, rng);
    const double theta_t = angle(rng);
    const double phi_h = angle(rng);
    const double phi_v = angle(rng);
    const CVec ris = kron(steering_vector(cfg.n_h, phi_h), steering_vector(cfg.n_v, phi_v));
    ch.h_t.noalias() += z * ris.conjugate() * steering_vector(cfg.n_tx, theta_t).transpose();
  }
  for (int l = 0; l <= cfg.n_paths; ++l) {
    const cplx z = detail::path_gain(l, cfg.rician_r, cfg.n_paths, rng);
    const double theta_r = angle(rng);
    const double vphi_h = angle(rng);
    const double vphi_v = angle(rng);
    const CVec ris = kron(steering_vector(cfg.n_v, vphi_v), steering_vector(cfg.n_h, vphi_h));
    ch.h_r_herm.noalias() += z * steering_vector(cfg.n_rx, theta_r).conjugate() * ris.transpose();
  }
  ch.h_t *= std::sqrt(ch.l_t);
  ch.h_r_herm *= std::sqrt(ch.l_r);
  return ch;
}

/// Cascaded channel H_r^H diag(response) H_t, N_r x N_t.
inline CMat effective_channel(const ChannelPair& ch, const CVec& response) {
  if (response.size() != ch.h_t.rows() || ch.h_r_herm.cols() != ch.h_t.rows())
    throw std::invalid_argument("effective_channel: RIS dimension mismatch");
  return ch.h_r_herm * response.asDiagonal() * ch.h_t;
}

inline CMat effective_channel(const ChannelPair& ch, const RisConfig& ris) {
  return effective_channel(ch, ris.response);
}

}  // namespace rispre
