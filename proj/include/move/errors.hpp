#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace move {

// Operand shapes do not line up.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Caller passed values outside the documented domain.
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Non-finite values where finite ones are required.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Training loss left the representable range.
struct NonFiniteLossError : NumericError {
  using NumericError::NumericError;
};

// Optimizer driven without populated gradients.
struct StateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Checkpoint or config incompatible with the requested operation.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed file contents; remembers where parsing stopped.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t byte_offset)
      : std::runtime_error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
        offset_(byte_offset) {}

  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace move
