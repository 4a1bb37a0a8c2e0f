#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "codebook.hpp"
#include "precoding.hpp"

namespace rispre {

inline constexpr double kNearOptimalDb = 0.5;

struct SearchOutcome {
  int best_index = 0;
  double best_rate = 0.0;
  std::vector<double> rates;
  std::vector<bool> label_set;
};

/// Marks every codeword whose rate is within delta_db (as a rate ratio) of the best.
inline std::vector<bool> near_optimal_label_set(const std::vector<double>& rates,
                                                double delta_db = kNearOptimalDb) {
  if (rates.empty()) throw std::invalid_argument("near_optimal_label_set: empty rate vector");
  if (!(delta_db >= 0.0)) throw std::invalid_argument("near_optimal_label_set: delta_db < 0");
  double best = rates.front();
  for (double r : rates) best = std::max(best, r);
  const double floor = best * std::pow(10.0, -delta_db / 10.0);
  std::vector<bool> out(rates.size());
  for (std::size_t q = 0; q < rates.size(); ++q) out[q] = rates[q] >= floor || rates[q] == best;
  return out;
}

/// First index of the maximum.
inline int argmax_first(const std::vector<double>& v) {
  int best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = static_cast<int>(i);
  return best;
}

inline SearchOutcome exhaustive_search(const ChannelPair& ch, const Codebook& cb, double p_watts,
                                       double noise_watts, double delta_db = kNearOptimalDb) {
  if (cb.size() == 0) throw std::invalid_argument("exhaustive_search: empty codebook");
  SearchOutcome out;
  out.rates.resize(static_cast<std::size_t>(cb.size()));
  for (Eigen::Index q = 0; q < cb.size(); ++q)
    out.rates[q] = evaluate_response(ch, cb.words.col(q), p_watts, noise_watts).rate_bps_hz;
  out.best_index = argmax_first(out.rates);
  out.best_rate = out.rates[out.best_index];
  out.label_set = near_optimal_label_set(out.rates, delta_db);
  return out;
}

struct AoResult {
  RisConfig ris;
  double rate = 0.0;
  std::vector<double> sweep_rates;  // rate after each completed sweep, first entry = initial
};

namespace detail {

// log2 |I + snr * G^H G| for a small N_r x N_s matrix G.
inline double logdet_rate(const CMat& g, double snr) {
  const Eigen::Index ns = g.cols();
  if (ns == 0) return 0.0;
  const CMat m = CMat::Identity(ns, ns) + snr * g.adjoint() * g;
  if (ns == 1) return std::log2(m(0, 0).real());
  if (ns == 2) return std::log2((m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real());
  return std::log2(std::abs(m.partialPivLu().determinant()));
}

}  // namespace detail

/// Coordinate-ascent stand-in for alternating optimization. Each sweep fixes
/// the SVD precoder of the current RIS state, then visits every element in
/// order and keeps the best phase from a uniform grid on [-pi, pi) (with the
/// hardware amplitude at that phase). Stops when a sweep gains < 1e-4 bit/s/Hz.
inline AoResult alternating_optimization(const ChannelPair& ch, const SystemConfig& cfg,
                                         double p_watts, double noise_watts, int phase_grid = 16,
                                         int max_sweeps = 30) {
  if (phase_grid < 2) throw std::invalid_argument("alternating_optimization: phase_grid < 2");
  const Eigen::Index n_ris = ch.h_t.rows();

  std::vector<double> grid_phase(phase_grid);
  std::vector<cplx> grid_resp(phase_grid);
  for (int g = 0; g < phase_grid; ++g) {
    grid_phase[g] = -kPi + g * 2.0 * kPi / phase_grid;
    grid_resp[g] = std::polar(amplitude_model(grid_phase[g], cfg), grid_phase[g]);
  }

  AoResult res;
  res.ris = ris_config_from_phases(RVec::Zero(n_ris), cfg, false);
  CMat h_eff = effective_channel(ch, res.ris.response);
  res.rate = rate_of(h_eff, p_watts, noise_watts);
  res.sweep_rates.push_back(res.rate);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const PrecodingResult pre = svd_precoder(h_eff);
    if (pre.n_streams == 0) break;
    const double snr = p_watts / (noise_watts * pre.n_streams);
    const CMat t = ch.h_t * pre.precoder;  // row n: contribution of element n, N x N_s
    CMat hf = h_eff * pre.precoder;        // N_r x N_s

    for (Eigen::Index n = 0; n < n_ris; ++n) {
      const CMat contrib = ch.h_r_herm.col(n) * t.row(n);  // N_r x N_s per unit response
      const cplx current = res.ris.response[n];
      const CMat base = hf - current * contrib;
      double best = detail::logdet_rate(hf, snr);
      int best_g = -1;
      for (int g = 0; g < phase_grid; ++g) {
        const double r = detail::logdet_rate(base + grid_resp[g] * contrib, snr);
        if (r > best) {
          best = r;
          best_g = g;
        }
      }
      if (best_g >= 0) {
        const cplx delta = grid_resp[best_g] - current;
        h_eff.noalias() += delta * ch.h_r_herm.col(n) * ch.h_t.row(n);
        hf = base + grid_resp[best_g] * contrib;
        res.ris.phases[n] = grid_phase[best_g];
        res.ris.amplitudes[n] = std::abs(grid_resp[best_g]);
        res.ris.response[n] = grid_resp[best_g];
      }
    }

    h_eff = effective_channel(ch, res.ris.response);
    const double rate = rate_of(h_eff, p_watts, noise_watts);
    if (rate + 1e-9 * std::max(1.0, std::abs(res.rate)) < res.rate)
      throw std::logic_error("alternating_optimization: sweep decreased the rate");
    const double gain = rate - res.rate;
    res.rate = std::max(rate, res.rate);
    res.sweep_rates.push_back(res.rate);
    if (gain < 1e-4) break;
  }
  return res;
}

inline int random_selection(const Codebook& cb, Rng& rng) {
  if (cb.size() < 1) throw std::invalid_argument("random_selection: empty codebook");
  std::uniform_int_distribution<int> pick(0, static_cast<int>(cb.size()) - 1);
  return pick(rng);
}

}  // namespace rispre
