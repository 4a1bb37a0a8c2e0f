#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "sysmodel.hpp"

namespace rispre {

inline constexpr double kDefaultRankTol = 1e-8;

struct PrecodingResult {
  CMat precoder;    // N_t x N_s, orthonormal columns
  RVec singulars;   // descending, length N_s
  int n_streams = 0;
  double rate_bps_hz = 0.0;
};

/// Right singular vectors of the effective channel, truncated to its
/// numerical rank (singular values above rel_tol * largest).
inline PrecodingResult svd_precoder(const CMat& h_eff, double rel_tol = kDefaultRankTol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0))
    throw std::invalid_argument("svd_precoder: rel_tol must lie in (0, 1)");
  if (!h_eff.allFinite()) throw std::invalid_argument("svd_precoder: non-finite channel");

  PrecodingResult out;
  Eigen::JacobiSVD<CMat> svd(h_eff, Eigen::ComputeThinV);
  const RVec& s = svd.singularValues();
  if (s.size() == 0 || !(s[0] > 0.0)) {
    out.precoder.resize(h_eff.cols(), 0);
    out.singulars.resize(0);
    return out;
  }
  int rank = 0;
  while (rank < s.size() && s[rank] > rel_tol * s[0]) ++rank;
  out.n_streams = rank;
  out.singulars = s.head(rank);
  out.precoder = svd.matrixV().leftCols(rank);
  return out;
}

/// Sum over streams of log2(1 + P / (sigma^2 N_s) tau_c^2).
inline double spectral_efficiency(const RVec& singulars, double p_watts, double noise_watts,
                                  int n_streams) {
  if (n_streams == 0) return 0.0;
  if (n_streams != singulars.size())
    throw std::invalid_argument("spectral_efficiency: n_streams must equal singulars.size()");
  if (!(p_watts > 0.0 && noise_watts > 0.0))
    throw std::invalid_argument("spectral_efficiency: powers must be positive");
  const double snr = p_watts / (noise_watts * n_streams);
  double r = 0.0;
  for (Eigen::Index c = 0; c < singulars.size(); ++c)
    r += std::log2(1.0 + snr * singulars[c] * singulars[c]);
  return r;
}

/// Determinant form log2 |I + P / (sigma^2 N_s) F^H H^H H F| for an arbitrary precoder.
inline double spectral_efficiency_det(const CMat& h_eff, const CMat& precoder, double p_watts,
                                      double noise_watts, int n_streams) {
  if (n_streams == 0) return 0.0;
  if (precoder.rows() != h_eff.cols() || precoder.cols() != n_streams)
    throw std::invalid_argument("spectral_efficiency_det: precoder dimension mismatch");
  const CMat hf = h_eff * precoder;
  const CMat m = CMat::Identity(n_streams, n_streams) +
                 (p_watts / (noise_watts * n_streams)) * hf.adjoint() * hf;
  return std::log2(std::abs(m.partialPivLu().determinant()));
}

inline PrecodingResult evaluate_response(const ChannelPair& ch, const CVec& response,
                                         double p_watts, double noise_watts) {
  PrecodingResult r = svd_precoder(effective_channel(ch, response));
  r.rate_bps_hz = spectral_efficiency(r.singulars, p_watts, noise_watts, r.n_streams);
  return r;
}

inline double rate_of(const CMat& h_eff, double p_watts, double noise_watts) {
  const PrecodingResult r = svd_precoder(h_eff);
  return spectral_efficiency(r.singulars, p_watts, noise_watts, r.n_streams);
}

}  // namespace rispre
