#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "move/tensor.hpp"

namespace move {

// Parameter checkpoint, magic "MOVP":
//   magic (4 bytes), version u32, count u32, then per parameter:
//   name length u16, name bytes, rank u8, dims u32 each,
//   payload of 32-bit little-endian floats in row-major order.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct StoredParam {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> values;  // row-major
};

void write_checkpoint(const std::string& path, const std::vector<StoredParam>& params);
std::vector<StoredParam> read_checkpoint(const std::string& path);

StoredParam to_stored(const ad::Param& param);
// Copies values into the param; shapes must already match.
void load_into(const StoredParam& stored, ad::Param& param);

}  // namespace move
