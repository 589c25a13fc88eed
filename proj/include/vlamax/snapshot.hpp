#pragma once
// Snapshot files. Binary layout (little-endian):
//   char[8] "VLMXSNAP" | u32 version | u32 role | u64 N | f64 r_N | f64 dt | f64 t | u64 seed
//   | f64 x[N][3] | f64 xi[N][3] | f64 K[N][3]
// The JSON variant carries the same fields by name.

#include <cstdint>
#include <string>
#include <vector>

#include "vlamax/kinematics.hpp"

namespace vlamax {

enum class SnapshotRole : std::uint32_t { Micro = 0, Reference = 1, Tracer = 2 };

struct Snapshot {
  static constexpr std::uint32_t kVersion = 1;
  SnapshotRole role = SnapshotRole::Micro;
  double r_N = 0.0, dt = 0.0, t = 0.0;
  std::uint64_t seed = 0;
  std::vector<Vec3> x, xi, K;
  std::size_t size() const { return x.size(); }
};

void write_snapshot(const std::string& path, const Snapshot& s);
void write_snapshot_json(const std::string& path, const Snapshot& s);
// reads either variant (binary detected by its magic)
Snapshot read_snapshot(const std::string& path);

std::string role_name(SnapshotRole r);

}  // namespace vlamax
