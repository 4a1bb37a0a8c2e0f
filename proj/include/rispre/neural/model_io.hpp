#pragma once

#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "../binary_io.hpp"
#include "network.hpp"

namespace rispre::nn {

inline constexpr int kModelFormatVersion = 1;

namespace detail {

inline std::vector<double> to_vector(const Vec& v) { return {v.data(), v.data() + v.size()}; }

inline Vec to_vec(const json& j, Eigen::Index expected, const char* what) {
  const auto v = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(v.size()) != expected)
    throw ConsistencyError(std::string("load_model: wrong length for ") + what);
  return Eigen::Map<const Vec>(v.data(), expected);
}

}  // namespace detail

/// Writes model.json (architecture, tensor order and shapes, batch-norm
/// running statistics, input standardization) and weights.f64le (every
/// learnable tensor, column-major, concatenated in manifest order).
inline void save_model(const ModelParams& p, const std::filesystem::path& dir,
                       const json& extra = json::object()) {
  std::filesystem::create_directories(dir);
  json tensors = json::array();
  std::vector<double> flat;
  for_each_tensor(
      [&](const char* name, const Mat& m) {
        tensors.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
        flat.insert(flat.end(), m.data(), m.data() + m.size());
      },
      p.w);
  json manifest{{"format", "rispre-model"},
                {"version", kModelFormatVersion},
                {"architecture", p.arch},
                {"tensor_order", tensors},
                {"layout", "column-major float64 little-endian, manifest order"},
                {"batch_norm",
                 {{"ready", p.bn_ready},
                  {"bn1", {{"mean", detail::to_vector(p.bn1.mean)}, {"var", detail::to_vector(p.bn1.var)}}},
                  {"bn2", {{"mean", detail::to_vector(p.bn2.mean)}, {"var", detail::to_vector(p.bn2.var)}}}}},
                {"input_norm",
                 {{"mean", detail::to_vector(p.input_mean)},
                  {"scale", detail::to_vector(p.input_scale)}}},
                {"extra", extra}};
  std::ofstream(dir / "model.json") << manifest.dump(1) << '\n';
  write_le_file(dir / "weights.f64le", flat);
}

inline ModelParams load_model(const std::filesystem::path& dir, json* extra = nullptr) {
  std::ifstream in(dir / "model.json");
  if (!in) throw FormatError("load_model: missing model.json in " + dir.string());
  const json m = json::parse(in);
  if (m.value("format", "") != "rispre-model") throw FormatError("load_model: not a rispre model");
  if (m.value("version", -1) != kModelFormatVersion)
    throw VersionError("load_model: unsupported version");

  ModelParams p = init_params(m.at("architecture").get<Architecture>(), 0);
  const auto flat = read_le_file<double>(dir / "weights.f64le");
  const auto& order = m.at("tensor_order");
  std::size_t idx = 0, offset = 0;
  for_each_tensor(
      [&](const char* name, Mat& t) {
        if (idx >= order.size() || order[idx].at("name") != name ||
            order[idx].at("rows") != t.rows() || order[idx].at("cols") != t.cols())
          throw ConsistencyError(std::string("load_model: manifest disagrees at tensor ") + name);
        if (offset + static_cast<std::size_t>(t.size()) > flat.size())
          throw TruncatedError("load_model: weights.f64le is truncated");
        t = Eigen::Map<const Mat>(flat.data() + offset, t.rows(), t.cols());
        offset += static_cast<std::size_t>(t.size());
        ++idx;
      },
      p.w);
  if (offset != flat.size()) throw ConsistencyError("load_model: weights.f64le has trailing data");

  const auto& bn = m.at("batch_norm");
  p.bn_ready = bn.at("ready");
  p.bn1.mean = detail::to_vec(bn.at("bn1").at("mean"), p.arch.dense1, "bn1.mean");
  p.bn1.var = detail::to_vec(bn.at("bn1").at("var"), p.arch.dense1, "bn1.var");
  p.bn2.mean = detail::to_vec(bn.at("bn2").at("mean"), p.arch.dense2, "bn2.mean");
  p.bn2.var = detail::to_vec(bn.at("bn2").at("var"), p.arch.dense2, "bn2.var");
  p.input_mean = detail::to_vec(m.at("input_norm").at("mean"), p.arch.input_dim, "input mean");
  p.input_scale = detail::to_vec(m.at("input_norm").at("scale"), p.arch.input_dim, "input scale");
  if (extra) *extra = m.value("extra", json::object());
  return p;
}

inline bool bitwise_equal(const ModelParams& a, const ModelParams& b) {
  if (json(a.arch) != json(b.arch) || a.bn_ready != b.bn_ready) return false;
  bool same = true;
  auto eq = [](const auto& x, const auto& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() &&
           std::memcmp(x.data(), y.data(), sizeof(double) * static_cast<std::size_t>(x.size())) == 0;
  };
  for_each_tensor([&](const char*, const Mat& x, const Mat& y) { same = same && eq(x, y); }, a.w,
                  b.w);
  return same && eq(a.bn1.mean, b.bn1.mean) && eq(a.bn1.var, b.bn1.var) &&
         eq(a.bn2.mean, b.bn2.mean) && eq(a.bn2.var, b.bn2.var) &&
         eq(a.input_mean, b.input_mean) && eq(a.input_scale, b.input_scale);
}

}  // namespace rispre::nn
