#pragma once

#include <string>

#include "bihartree/error.hpp"
#include "bihartree/exponents.hpp"
#include "bihartree/grid.hpp"

namespace bihartree {

inline constexpr int kCheckpointVersion = 1;

/// Payload length or SHA-256 does not match the header.
class ChecksumError : public IoError {
 public:
  using IoError::IoError;
};

/// Header carries a format_version this build does not read.
class VersionError : public IoError {
 public:
  using IoError::IoError;
};

struct Checkpoint {
  ComplexField field;
  double t = 0.0;
  ModelParams params;
  std::string sha256;
};

/// One JSON header line {format_version, d, M, L, t, params, sha256}
/// followed by the samples as little-endian binary64 (re, im) pairs in
/// grid order.
void write_checkpoint(const std::string& path, const ComplexField& u, double t, const ModelParams& params);

/// Reads and verifies a checkpoint. With `grid` given, the stored shape must
/// match it and the field shares that grid.
Checkpoint read_checkpoint(const std::string& path, GridPtr grid = nullptr);

/// Lowercase hex SHA-256 of the payload bytes `u` would be written as.
std::string payload_sha256(const ComplexField& u);

}  // namespace bihartree
