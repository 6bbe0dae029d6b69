// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

// Checkpoint file layout (all integers and reals little-endian):
//
//   magic    8 bytes  "TVGANCKP"
//   version  u32      currently 1
//   count    u64      number of records
//   record*  { u32 name_len, name bytes, u32 rank, u64 dims[rank],
//              f64 data[product(dims)] }

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "tvgan/tensor.hpp"

namespace tvgan::nets {

inline constexpr std::uint32_t kCheckpointVersion = 1;

using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

void save_checkpoint(const std::filesystem::path& path, const NamedTensors& records);
NamedTensors load_checkpoint(const std::filesystem::path& path);

}  // namespace tvgan::nets
