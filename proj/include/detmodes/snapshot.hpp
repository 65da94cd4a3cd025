#pragma once

// Binary velocity snapshots.
//
// Layout, all little-endian:
//   bytes  0..7   magic "NSE3SNAP"
//   bytes  8..11  u32 version (1)
//   bytes 12..15  u32 N
//   bytes 16..23  f64 L
//   bytes 24..31  f64 nu
//   bytes 32..39  f64 t
//   bytes 40..47  u64 seed
// followed by 3 N^3 f64 physical samples, component-major, x-fastest.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "detmodes/field.hpp"

namespace detmodes {

inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderBytes = 48;

struct SnapshotHeader {
  std::uint32_t version = kSnapshotVersion;
  std::uint32_t n = 0;
  double length = 0.0;
  double nu = 0.0;
  double t = 0.0;
  std::uint64_t seed = 0;
};

struct Snapshot {
  SnapshotHeader header;
  PhysicalField samples;
};

class SnapshotError : public std::runtime_error {
 public:
  enum class Kind { io, bad_magic, unsupported_version, truncated_header, truncated_payload, bad_header, non_finite };

  SnapshotError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Spectral state -> snapshot with the given metadata.
Snapshot make_snapshot(const VectorField& u, double nu, double t, std::uint64_t seed);

/// Snapshot samples -> spectral field (forward transform).
VectorField snapshot_field(const Snapshot& snap);

std::size_t snapshot_file_size(int n);

/// Throws SnapshotError(non_finite) before touching the file when a sample is NaN or Inf.
void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);

/// Throws SnapshotError with a distinct kind per failure; nothing is returned on error.
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace detmodes
