#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rispre {

using json = nlohmann::json;

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Physical constants of one simulated RIS-assisted link.
///
/// Defaults reproduce the reference simulation setup: 10x2 MIMO, 8x8 RIS,
/// two NLOS paths, Rician factor 10 on both hops, and the phase-dependent
/// amplitude model with beta_min = 0.2, alpha = 1.6, psi0 = 0.43 pi.
struct SystemConfig {
  int n_tx = 10;
  int n_rx = 2;
  int n_h = 8;
  int n_v = 8;
  int n_ris = 64;
  int n_paths = 2;
  double rician_t = 10.0;
  double rician_r = 10.0;
  double pl_exp_t = 2.0;
  double pl_exp_r = 2.8;
  double dist_t = 10.0;
  double dist_r = 30.0;
  double ref_dist = 1.0;
  double ref_loss_db = -30.0;
  double ris_gain_db = 5.0;
  double beta_min = 0.2;
  double alpha = 1.6;
  double psi0 = 0.43 * std::numbers::pi;
  double noise_dbm = -80.0;
  std::vector<double> powers_dbm{20.0, 30.0, 40.0, 50.0, 60.0};
  int pilot_len = 16;
  std::uint64_t seed = 0;

  double noise_watts() const { return dbm_to_watts(noise_dbm); }

  void validate() const {
    if (n_tx < 1 || n_rx < 1 || n_h < 1 || n_v < 1 || n_paths < 1 || pilot_len < 1)
      throw std::invalid_argument("SystemConfig: all counts must be >= 1");
    if (n_ris != n_h * n_v)
      throw std::invalid_argument("SystemConfig: n_ris must equal n_h * n_v");
    if (!(beta_min > 0.0 && beta_min <= 1.0))
      throw std::invalid_argument("SystemConfig: beta_min must lie in (0, 1]");
    if (!(alpha > 0.0)) throw std::invalid_argument("SystemConfig: alpha must be > 0");
    if (!(ref_dist > 0.0)) throw std::invalid_argument("SystemConfig: ref_dist must be > 0");
    if (dist_t < ref_dist || dist_r < ref_dist)
      throw std::invalid_argument("SystemConfig: distances must be >= ref_dist");
    if (rician_t < 0.0 || rician_r < 0.0)
      throw std::invalid_argument("SystemConfig: Rician factors must be >= 0");
    if (powers_dbm.empty()) throw std::invalid_argument("SystemConfig: powers_dbm is empty");
  }

  /// Reduced geometry that keeps every structural property but trains on a laptop CPU.
  static SystemConfig desk() {
    SystemConfig c;
    c.n_tx = 4;
    c.n_rx = 2;
    c.n_h = 4;
    c.n_v = 4;
    c.n_ris = 16;
    c.pilot_len = 8;
    return c;
  }
};

namespace detail {

inline void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                                const char* what) {
  if (!j.is_object()) throw std::invalid_argument(std::string(what) + ": expected a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.contains(key))
      throw std::invalid_argument(std::string(what) + ": unknown key '" + key + "'");
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->template get<T>();
}

}  // namespace detail

inline void to_json(json& j, const SystemConfig& c) {
  j = json{{"n_tx", c.n_tx},
           {"n_rx", c.n_rx},
           {"n_h", c.n_h},
           {"n_v", c.n_v},
           {"n_ris", c.n_ris},
           {"n_paths", c.n_paths},
           {"rician_t", c.rician_t},
           {"rician_r", c.rician_r},
           {"pl_exp_t", c.pl_exp_t},
           {"pl_exp_r", c.pl_exp_r},
           {"dist_t", c.dist_t},
           {"dist_r", c.dist_r},
           {"ref_dist", c.ref_dist},
           {"ref_loss_db", c.ref_loss_db},
           {"ris_gain_db", c.ris_gain_db},
           {"beta_min", c.beta_min},
           {"alpha", c.alpha},
           {"psi0", c.psi0},
           {"noise_dbm", c.noise_dbm},
           {"powers_dbm", c.powers_dbm},
           {"pilot_len", c.pilot_len},
           {"seed", c.seed}};
}

// Missing keys keep their defaults; n_ris follows n_h * n_v when omitted.
inline void from_json(const json& j, SystemConfig& c) {
  static const std::set<std::string> known{
      "n_tx",     "n_rx",     "n_h",      "n_v",      "n_ris",       "n_paths",
      "rician_t", "rician_r", "pl_exp_t", "pl_exp_r", "dist_t",      "dist_r",
      "ref_dist", "ref_loss_db", "ris_gain_db", "beta_min", "alpha", "psi0",
      "noise_dbm", "powers_dbm", "pilot_len", "seed"};
  detail::reject_unknown_keys(j, known, "SystemConfig");
  using detail::read_opt;
  read_opt(j, "n_tx", c.n_tx);
  read_opt(j, "n_rx", c.n_rx);
  read_opt(j, "n_h", c.n_h);
  read_opt(j, "n_v", c.n_v);
  c.n_ris = c.n_h * c.n_v;
  read_opt(j, "n_ris", c.n_ris);
  read_opt(j, "n_paths", c.n_paths);
  read_opt(j, "rician_t", c.rician_t);
  read_opt(j, "rician_r", c.rician_r);
  read_opt(j, "pl_exp_t", c.pl_exp_t);
  read_opt(j, "pl_exp_r", c.pl_exp_r);
  read_opt(j, "dist_t", c.dist_t);
  read_opt(j, "dist_r", c.dist_r);
  read_opt(j, "ref_dist", c.ref_dist);
  read_opt(j, "ref_loss_db", c.ref_loss_db);
  read_opt(j, "ris_gain_db", c.ris_gain_db);
  read_opt(j, "beta_min", c.beta_min);
  read_opt(j, "alpha", c.alpha);
  read_opt(j, "psi0", c.psi0);
  read_opt(j, "noise_dbm", c.noise_dbm);
  read_opt(j, "powers_dbm", c.powers_dbm);
  read_opt(j, "pilot_len", c.pilot_len);
  read_opt(j, "seed", c.seed);
  c.validate();
}

}  // namespace rispre
