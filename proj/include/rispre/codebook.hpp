#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "binary_io.hpp"
#include "sysmodel.hpp"

namespace rispre {

enum class CodebookKind { ideal, practical };

inline const char* to_string(CodebookKind k) { return k == CodebookKind::ideal ? "ideal" : "practical"; }

/// Kronecker DFT codebook over the RIS. Column q of `words` is codeword
/// q = i * n_v + j, i the azimuth index and j the elevation index.
struct Codebook {
  CMat words;  // N x Q
  CodebookKind kind = CodebookKind::ideal;
  int n_h = 0;
  int n_v = 0;

  Eigen::Index size() const { return words.cols(); }
  Eigen::Index word_length() const { return words.rows(); }
  auto word(Eigen::Index q) const { return words.col(q); }
};

inline std::pair<RVec, RVec> quantized_angles(int n_h, int n_v) {
  if (n_h < 1 || n_v < 1) throw std::invalid_argument("quantized_angles: dimensions must be >= 1");
  RVec az(n_h), el(n_v);
  for (int i = 0; i < n_h; ++i) az[i] = i * 2.0 * kPi / n_h;
  for (int j = 0; j < n_v; ++j) el[j] = j * 2.0 * kPi / n_v;
  return {az, el};
}

inline Codebook build_ideal_codebook(int n_h, int n_v) {
  const auto [az, el] = quantized_angles(n_h, n_v);
  Codebook cb;
  cb.kind = CodebookKind::ideal;
  cb.n_h = n_h;
  cb.n_v = n_v;
  cb.words.resize(static_cast<Eigen::Index>(n_h) * n_v, static_cast<Eigen::Index>(n_h) * n_v);
  for (int i = 0; i < n_h; ++i)
    for (int j = 0; j < n_v; ++j)
      cb.words.col(i * n_v + j) = kron(steering_vector(n_h, az[i]), steering_vector(n_v, el[j]));
  return cb;
}

/// Scales every entry by the amplitude the hardware produces at its phase.
inline Codebook apply_hardware_model(const Codebook& cb, const SystemConfig& cfg) {
  if (cb.kind != CodebookKind::ideal)
    throw std::logic_error("apply_hardware_model: codebook already carries hardware amplitudes");
  Codebook out = cb;
  out.kind = CodebookKind::practical;
  for (Eigen::Index q = 0; q < cb.words.cols(); ++q)
    for (Eigen::Index n = 0; n < cb.words.rows(); ++n) {
      const double phase = std::arg(cb.words(n, q));
      out.words(n, q) = std::polar(amplitude_model(phase, cfg), phase);
    }
  return out;
}

inline Codebook build_codebook(const SystemConfig& cfg, CodebookKind kind) {
  Codebook cb = build_ideal_codebook(cfg.n_h, cfg.n_v);
  return kind == CodebookKind::ideal ? cb : apply_hardware_model(cb, cfg);
}

/// Writes `<stem>.json` (metadata) and `<stem>.c128le` (interleaved re/im
/// doubles, word-major).
inline void export_codebook(const Codebook& cb, const std::filesystem::path& stem) {
  json meta{{"format", "rispre-codebook"},
            {"version", 1},
            {"kind", to_string(cb.kind)},
            {"n_h", cb.n_h},
            {"n_v", cb.n_v},
            {"q", cb.size()},
            {"word_length", cb.word_length()},
            {"layout", "word-major, interleaved (re, im) float64 little-endian"}};
  auto meta_path = stem;
  meta_path += ".json";
  std::ofstream(meta_path) << meta.dump(2) << '\n';

  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(cb.words.size()) * 2);
  for (Eigen::Index q = 0; q < cb.size(); ++q)
    for (Eigen::Index n = 0; n < cb.word_length(); ++n) {
      flat.push_back(cb.words(n, q).real());
      flat.push_back(cb.words(n, q).imag());
    }
  auto bin_path = stem;
  bin_path += ".c128le";
  write_le_file<double>(bin_path, flat);
}

inline Codebook import_codebook(const std::filesystem::path& stem) {
  auto meta_path = stem;
  meta_path += ".json";
  std::ifstream in(meta_path);
  if (!in) throw std::runtime_error("import_codebook: cannot open " + meta_path.string());
  const json meta = json::parse(in);
  if (meta.value("format", "") != "rispre-codebook")
    throw std::runtime_error("import_codebook: not a codebook manifest");
  Codebook cb;
  cb.kind = meta.at("kind").get<std::string>() == "ideal" ? CodebookKind::ideal
                                                          : CodebookKind::practical;
  cb.n_h = meta.at("n_h");
  cb.n_v = meta.at("n_v");
  const auto q = meta.at("q").get<Eigen::Index>();
  const auto len = meta.at("word_length").get<Eigen::Index>();
  auto bin_path = stem;
  bin_path += ".c128le";
  const auto flat = read_le_file<double>(bin_path);
  if (flat.size() != static_cast<std::size_t>(q * len * 2))
    throw std::runtime_error("import_codebook: payload size does not match manifest");
  cb.words.resize(len, q);
  std::size_t k = 0;
  for (Eigen::Index c = 0; c < q; ++c)
    for (Eigen::Index n = 0; n < len; ++n, k += 2) cb.words(n, c) = {flat[k], flat[k + 1]};
  return cb;
}

}  // namespace rispre
