#include "detmodes/snapshot.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "detmodes/spectral.hpp"

namespace detmodes {

namespace {

constexpr std::array<char, 8> kMagic = {'N', 'S', 'E', '3', 'S', 'N', 'A', 'P'};

template <typename T>
void put_le(std::vector<unsigned char>& out, T value) {
  std::uint64_t bits = 0;
  if constexpr (sizeof(T) == 8) {
    bits = std::bit_cast<std::uint64_t>(value);
  } else {
    bits = static_cast<std::uint64_t>(std::bit_cast<std::uint32_t>(value));
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<unsigned char>(bits >> (8 * i)));
}

template <typename T>
T get_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  if constexpr (sizeof(T) == 8) {
    return std::bit_cast<T>(bits);
  } else {
    return std::bit_cast<T>(static_cast<std::uint32_t>(bits));
  }
}

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError(SnapshotError::Kind::io, "cannot open snapshot '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

Snapshot make_snapshot(const VectorField& u, double nu, double t, std::uint64_t seed) {
  SnapshotHeader h;
  h.n = static_cast<std::uint32_t>(u.grid().n());
  h.length = u.grid().length();
  h.nu = nu;
  h.t = t;
  h.seed = seed;
  return {h, inverse_transform(u)};
}

VectorField snapshot_field(const Snapshot& snap) { return forward_transform(snap.samples); }

std::size_t snapshot_file_size(int n) {
  return kSnapshotHeaderBytes + 3 * static_cast<std::size_t>(n) * n * n * sizeof(double);
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
  const TorusGrid& g = snap.samples.grid;
  if (snap.header.n != static_cast<std::uint32_t>(g.n())) {
    throw SnapshotError(SnapshotError::Kind::bad_header, "snapshot header N does not match the samples");
  }
  std::vector<unsigned char> bytes;
  bytes.reserve(snapshot_file_size(g.n()));
  bytes.insert(bytes.end(), kMagic.begin(), kMagic.end());
  put_le(bytes, snap.header.version);
  put_le(bytes, snap.header.n);
  put_le(bytes, snap.header.length);
  put_le(bytes, snap.header.nu);
  put_le(bytes, snap.header.t);
  put_le(bytes, snap.header.seed);
  for (const auto& comp : snap.samples.data) {
    for (double v : comp) {
      if (!std::isfinite(v)) throw SnapshotError(SnapshotError::Kind::non_finite, "snapshot sample is not finite");
      put_le(bytes, v);
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SnapshotError(SnapshotError::Kind::io, "cannot write snapshot '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw SnapshotError(SnapshotError::Kind::io, "write failed for '" + path.string() + "'");
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  const std::vector<unsigned char> bytes = read_all(path);
  if (bytes.size() >= kMagic.size() && std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw SnapshotError(SnapshotError::Kind::bad_magic, "'" + path.string() + "' is not a snapshot (bad magic)");
  }
  if (bytes.size() < kSnapshotHeaderBytes) {
    throw SnapshotError(SnapshotError::Kind::truncated_header, "truncated header in '" + path.string() + "'");
  }
  SnapshotHeader h;
  const unsigned char* p = bytes.data() + kMagic.size();
  h.version = get_le<std::uint32_t>(p);
  h.n = get_le<std::uint32_t>(p + 4);
  h.length = get_le<double>(p + 8);
  h.nu = get_le<double>(p + 16);
  h.t = get_le<double>(p + 24);
  h.seed = get_le<std::uint64_t>(p + 32);
  if (h.version != kSnapshotVersion) {
    throw SnapshotError(SnapshotError::Kind::unsupported_version,
                        "unsupported snapshot version " + std::to_string(h.version));
  }
  if (h.n < 8 || h.n % 2 != 0 || h.n > 4096 || !(h.length > 0.0) || !std::isfinite(h.length)) {
    throw SnapshotError(SnapshotError::Kind::bad_header, "invalid grid in snapshot header");
  }
  const std::size_t expected = snapshot_file_size(static_cast<int>(h.n));
  if (bytes.size() < expected) {
    throw SnapshotError(SnapshotError::Kind::truncated_payload,
                        "truncated payload: expected " + std::to_string(expected) + " bytes, found " +
                            std::to_string(bytes.size()));
  }
  if (bytes.size() > expected) {
    throw SnapshotError(SnapshotError::Kind::bad_header, "payload longer than the declared N implies");
  }
  PhysicalField samples(TorusGrid(static_cast<int>(h.n), h.length));
  const unsigned char* q = bytes.data() + kSnapshotHeaderBytes;
  for (auto& comp : samples.data) {
    for (double& v : comp) {
      v = get_le<double>(q);
      if (!std::isfinite(v)) {
        throw SnapshotError(SnapshotError::Kind::non_finite, "non-finite sample in '" + path.string() + "'");
      }
      q += sizeof(double);
    }
  }
  return {h, std::move(samples)};
}

}  // namespace detmodes
