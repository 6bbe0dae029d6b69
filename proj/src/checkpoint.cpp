// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvgan/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include "tvgan/error.hpp"

namespace tvgan::nets {

namespace {

constexpr char kMagic[8] = {'T', 'V', 'G', 'A', 'N', 'C', 'K', 'P'};

template <class T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::string& path) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw IoError("checkpoint: truncated file " + path);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const NamedTensors& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("checkpoint: cannot open " + path.string() + " for writing");
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, records.size());
  for (const auto& [name, tensor] : records) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(tensor.rank()));
    for (std::size_t d : tensor.shape()) put<std::uint64_t>(out, d);
    for (double v : tensor.data()) put<double>(out, v);
  }
  if (!out) throw IoError("checkpoint: write failed for " + path.string());
}

NamedTensors load_checkpoint(const std::filesystem::path& path) {
  const std::string where = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint: cannot open " + where);
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw IoError("checkpoint: bad magic in " + where);
  }
  const auto version = get<std::uint32_t>(in, where);
  if (version != kCheckpointVersion) {
    throw IoError("checkpoint: unsupported version " + std::to_string(version) + " in " + where);
  }
  const auto count = get<std::uint64_t>(in, where);
  NamedTensors records;
  for (std::uint64_t r = 0; r < count; ++r) {
    const auto name_len = get<std::uint32_t>(in, where);
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) throw IoError("checkpoint: truncated file " + where);
    const auto rank = get<std::uint32_t>(in, where);
    Shape shape(rank);
    for (auto& d : shape) d = static_cast<std::size_t>(get<std::uint64_t>(in, where));
    std::vector<double> data(shape_numel(shape));
    for (double& v : data) v = get<double>(in, where);
    records.emplace_back(std::move(name), Tensor(std::move(shape), std::move(data)));
  }
  return records;
}

}  // namespace tvgan::nets
