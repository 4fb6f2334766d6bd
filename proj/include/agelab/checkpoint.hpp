#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "agelab/neural.hpp"

namespace agelab {

// "AGEQ" checkpoint layout, all little-endian:
//   magic "AGEQ" | u32 version (=1) | u32 layer count N | N x u32 layer dims |
//   for each of the N-1 weight layers: row-major f64 weight matrix
//   (rows = outputs), then f64 bias vector.
// The activation tag is not serialized; loaded networks use tanh hiddens.

struct CheckpointError : std::runtime_error {
  explicit CheckpointError(const std::string& what) : std::runtime_error(what) {}
};
struct BadMagicError : CheckpointError {
  using CheckpointError::CheckpointError;
};
struct VersionMismatchError : CheckpointError {
  using CheckpointError::CheckpointError;
};
struct TruncatedFileError : CheckpointError {
  using CheckpointError::CheckpointError;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const neural::QNetwork& net, const std::filesystem::path& path);
neural::QNetwork load_checkpoint(const std::filesystem::path& path);

}  // namespace agelab
