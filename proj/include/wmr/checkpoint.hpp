#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wmr/tensor.hpp"

namespace wmr {

// Named-tensor container written to disk as:
//   magic "WMR1", format version as u16 LE, then one record per tensor:
//   u32 name length, name bytes, u32 rank, u32 extents, values as LE binary64.
// Records run to end of file.
using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

void save_checkpoint(const std::string& path, const NamedTensors& tensors);
NamedTensors load_checkpoint(const std::string& path);

constexpr std::uint16_t kCheckpointVersion = 1;

}  // namespace wmr
