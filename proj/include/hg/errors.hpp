#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hg {

/// Malformed or truncated on-disk data. Carries the byte offset at which
/// parsing failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t byte_offset)
      : std::runtime_error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
        offset_(byte_offset) {}

  std::uint64_t byte_offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

/// Inconsistent numerical configuration (CFL violation, dt mismatch, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace hg
