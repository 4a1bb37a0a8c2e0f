#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rispre {

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct VersionError : FormatError {
  using FormatError::FormatError;
};
struct TruncatedError : FormatError {
  using FormatError::FormatError;
};
struct ConsistencyError : FormatError {
  using FormatError::FormatError;
};

namespace detail {

template <typename T>
void to_little_endian(T& v) {
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    auto* p = reinterpret_cast<unsigned char*>(&v);
    std::reverse(p, p + sizeof(T));
  }
}

}  // namespace detail

template <typename T>
void write_le_file(const std::filesystem::path& path, std::span<const T> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  std::vector<T> buf(data.begin(), data.end());
  for (auto& v : buf) detail::to_little_endian(v);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(T)));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

template <typename T>
void write_le_file(const std::filesystem::path& path, const std::vector<T>& data) {
  write_le_file<T>(path, std::span<const T>(data));
}

template <typename T>
std::vector<T> read_le_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  if (bytes % sizeof(T) != 0)
    throw TruncatedError(path.string() + ": size is not a multiple of the element width");
  std::vector<T> out(bytes / sizeof(T));
  in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw TruncatedError("short read: " + path.string());
  for (auto& v : out) detail::to_little_endian(v);
  return out;
}

}  // namespace rispre
