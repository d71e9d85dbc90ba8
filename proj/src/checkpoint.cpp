#include "move/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <limits>

#include "move/errors.hpp"

namespace move {

namespace {

// Little-endian scalar writes; the build targets little-endian hosts and the
// round-trip tests would catch a mismatch.
template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::istream& in, std::uint64_t& offset, const char* what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw FormatError(std::string("checkpoint: truncated ") + what, offset);
  offset += sizeof(T);
  return v;
}

}  // namespace

void write_checkpoint(const std::string& path, const std::vector<StoredParam>& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("checkpoint: cannot open for writing: " + path);
  out.write("MOVP", 4);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const StoredParam& p : params) {
    if (p.name.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw ArgumentError("checkpoint: parameter name too long: " + p.name);
    }
    std::uint64_t count = 1;
    for (std::uint32_t d : p.dims) count *= d;
    if (count != p.values.size()) {
      throw ArgumentError("checkpoint: dims/value size mismatch for " + p.name);
    }
    put<std::uint16_t>(out, static_cast<std::uint16_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put<std::uint8_t>(out, static_cast<std::uint8_t>(p.dims.size()));
    for (std::uint32_t d : p.dims) put<std::uint32_t>(out, d);
    out.write(reinterpret_cast<const char*>(p.values.data()),
              static_cast<std::streamsize>(p.values.size() * sizeof(float)));
  }
  if (!out) throw IoError("checkpoint: write failed: " + path);
}

std::vector<StoredParam> read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint: cannot open for reading: " + path);
  std::uint64_t offset = 0;
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "MOVP", 4) != 0) {
    throw FormatError("checkpoint: bad magic", offset);
  }
  offset += 4;
  const auto version = take<std::uint32_t>(in, offset, "version");
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version), offset - 4);
  }
  const auto count = take<std::uint32_t>(in, offset, "count");
  std::vector<StoredParam> params;
  params.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    StoredParam p;
    const auto name_len = take<std::uint16_t>(in, offset, "name length");
    p.name.resize(name_len);
    in.read(p.name.data(), name_len);
    if (!in) throw FormatError("checkpoint: truncated name", offset);
    offset += name_len;
    const auto rank = take<std::uint8_t>(in, offset, "rank");
    std::uint64_t total = 1;
    for (std::uint8_t d = 0; d < rank; ++d) {
      const auto dim = take<std::uint32_t>(in, offset, "dim");
      p.dims.push_back(dim);
      total *= dim;
    }
    p.values.resize(total);
    in.read(reinterpret_cast<char*>(p.values.data()),
            static_cast<std::streamsize>(total * sizeof(float)));
    if (!in) throw FormatError("checkpoint: truncated payload for " + p.name, offset);
    offset += total * sizeof(float);
    params.push_back(std::move(p));
  }
  return params;
}

StoredParam to_stored(const ad::Param& param) {
  StoredParam s;
  s.name = param.name;
  s.dims = param.dims;
  s.values.resize(static_cast<std::size_t>(param.value.size()));
  for (Eigen::Index i = 0; i < param.value.size(); ++i) {
    s.values[static_cast<std::size_t>(i)] = static_cast<float>(param.value.data()[i]);
  }
  return s;
}

void load_into(const StoredParam& stored, ad::Param& param) {
  if (stored.dims != param.dims ||
      static_cast<Eigen::Index>(stored.values.size()) != param.value.size()) {
    throw ConfigError("checkpoint: shape mismatch for parameter '" + stored.name + "'");
  }
  for (Eigen::Index i = 0; i < param.value.size(); ++i) {
    param.value.data()[i] = static_cast<double>(stored.values[static_cast<std::size_t>(i)]);
  }
}

}  // namespace move
