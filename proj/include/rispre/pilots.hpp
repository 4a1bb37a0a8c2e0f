#pragma once

#include <array>
#include <random>
#include <stdexcept>
#include <string>

#include "sysmodel.hpp"

namespace rispre {

enum class FeatureMode { kron_even, raw };
enum class ReferenceMode { zero, random };

inline const char* to_string(FeatureMode m) { return m == FeatureMode::kron_even ? "kron-even" : "raw"; }
inline const char* to_string(ReferenceMode m) { return m == ReferenceMode::zero ? "zero" : "random"; }

inline FeatureMode feature_mode_from_string(const std::string& s) {
  if (s == "kron-even") return FeatureMode::kron_even;
  if (s == "raw") return FeatureMode::raw;
  throw std::invalid_argument("unknown feature mode '" + s + "'");
}

inline ReferenceMode reference_mode_from_string(const std::string& s) {
  if (s == "zero") return ReferenceMode::zero;
  if (s == "random") return ReferenceMode::random;
  throw std::invalid_argument("unknown reference mode '" + s + "'");
}

/// Real feature sequence, one column per pilot step (D x K). Stored in single
/// precision, which is also the on-disk precision.
struct FeatureSequence {
  Eigen::MatrixXf steps;

  Eigen::Index dim() const { return steps.rows(); }
  Eigen::Index length() const { return steps.cols(); }
};

inline int feature_dim(int n_tx, int n_ris, FeatureMode mode) {
  return mode == FeatureMode::raw ? 2 * n_tx : 2 * n_tx * ((n_ris + 1) / 2);
}

/// Uplink pilot matrix, N_r x K, i.i.d. 16-QAM with per-entry energy p_ul / N_r.
inline CMat generate_pilots(const SystemConfig& cfg, double p_ul_watts, Rng& rng) {
  if (cfg.pilot_len < 1) throw std::invalid_argument("generate_pilots: pilot length must be >= 1");
  static constexpr std::array<double, 4> levels{-3.0, -1.0, 1.0, 3.0};
  const double scale = std::sqrt(p_ul_watts / (10.0 * cfg.n_rx));
  std::uniform_int_distribution<int> pick(0, 3);
  CMat x(cfg.n_rx, cfg.pilot_len);
  for (Eigen::Index k = 0; k < x.cols(); ++k)
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const double re = levels[pick(rng)];
      const double im = levels[pick(rng)];
      x(r, k) = scale * cplx(re, im);
    }
  return x;
}

/// Received uplink block H_eff^H X + W at the BS, N_t x K.
inline CMat uplink_receive(const ChannelPair& ch, const RisConfig& reference, const CMat& pilots,
                           double noise_watts, Rng& rng) {
  const CMat h_eff = effective_channel(ch, reference);
  if (pilots.rows() != h_eff.rows())
    throw std::invalid_argument("uplink_receive: pilot rows must equal N_r");
  CMat r = h_eff.adjoint() * pilots;
  if (noise_watts > 0.0) {
    std::normal_distribution<double> g(0.0, std::sqrt(noise_watts / 2.0));
    for (Eigen::Index k = 0; k < r.cols(); ++k)
      for (Eigen::Index c = 0; c < r.rows(); ++c) {
        const double re = g(rng);
        const double im = g(rng);
        r(c, k) += cplx(re, im);
      }
  }
  return r;
}

/// Fixed RIS state under which pilots are observed: all-zero phases, or a
/// seeded random draw on [-pi, pi). Amplitudes follow the hardware model.
inline RisConfig reference_ris(const SystemConfig& cfg, ReferenceMode mode, std::uint64_t seed) {
  RVec phases = RVec::Zero(cfg.n_ris);
  if (mode == ReferenceMode::random) {
    Rng rng = make_stream(seed, Stream::reference);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (Eigen::Index n = 0; n < phases.size(); ++n) phases[n] = u(rng);
  }
  return ris_config_from_phases(phases, cfg, false);
}

/// Rearranges the received block into real network inputs.
///
/// kron-even: step k is [Re; Im] of r(k) (x) phi_even, where phi_even holds the
/// reference response at even 0-based indices, giving D = 2 N_t ceil(N / 2).
/// raw: step k is [Re; Im] of r(k), D = 2 N_t.
inline FeatureSequence preprocess_features(const CMat& received, const RisConfig& reference,
                                           FeatureMode mode) {
  CVec weights;
  if (mode == FeatureMode::kron_even) {
    weights.resize((reference.size() + 1) / 2);
    for (Eigen::Index m = 0; m < weights.size(); ++m) weights[m] = reference.response[2 * m];
  } else {
    weights = CVec::Ones(1);
  }
  const Eigen::Index half = received.rows() * weights.size();
  FeatureSequence f;
  f.steps.resize(2 * half, received.cols());
  for (Eigen::Index k = 0; k < received.cols(); ++k) {
    const CVec v = kron(received.col(k), weights);
    for (Eigen::Index i = 0; i < half; ++i) {
      f.steps(i, k) = static_cast<float>(v[i].real());
      f.steps(half + i, k) = static_cast<float>(v[i].imag());
    }
  }
  return f;
}

}  // namespace rispre
