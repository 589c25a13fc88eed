#include "vlamax/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include <json.hpp>

namespace vlamax {

namespace {

constexpr char kMagic[8] = {'V', 'L', 'M', 'X', 'S', 'N', 'A', 'P'};

template <class T>
void put(std::string& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.append(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw std::runtime_error("snapshot: truncated file");
  unsigned char b[sizeof(T)];
  std::memcpy(b, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  pos += sizeof(T);
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

SnapshotRole role_from(std::uint32_t r) {
  if (r > 2) throw std::runtime_error("snapshot: unknown role");
  return static_cast<SnapshotRole>(r);
}

SnapshotRole role_from(const std::string& s) {
  for (std::uint32_t r = 0; r <= 2; ++r)
    if (role_name(static_cast<SnapshotRole>(r)) == s) return static_cast<SnapshotRole>(r);
  throw std::runtime_error("snapshot: unknown role " + s);
}

}  // namespace

std::string role_name(SnapshotRole r) {
  switch (r) {
    case SnapshotRole::Micro: return "micro";
    case SnapshotRole::Reference: return "reference";
    case SnapshotRole::Tracer: return "tracer";
  }
  return "?";
}

void write_snapshot(const std::string& path, const Snapshot& s) {
  std::string out(kMagic, 8);
  put<std::uint32_t>(out, Snapshot::kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.role));
  put<std::uint64_t>(out, s.size());
  put(out, s.r_N);
  put(out, s.dt);
  put(out, s.t);
  put<std::uint64_t>(out, s.seed);
  for (const auto* arr : {&s.x, &s.xi, &s.K}) {
    if (arr->size() != s.size()) throw std::invalid_argument("snapshot: array sizes differ");
    for (const Vec3& v : *arr)
      for (int c = 0; c < 3; ++c) put(out, v[c]);
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
}

void write_snapshot_json(const std::string& path, const Snapshot& s) {
  auto arr = [](const std::vector<Vec3>& a) {
    nlohmann::json j = nlohmann::json::array();
    for (const Vec3& v : a) j.push_back({v.x(), v.y(), v.z()});
    return j;
  };
  nlohmann::json j = {{"format", "vlamax.snapshot"}, {"version", Snapshot::kVersion},
                      {"role", role_name(s.role)}, {"N", s.size()},
                      {"r_N", s.r_N}, {"dt", s.dt}, {"t", s.t}, {"seed", s.seed},
                      {"x", arr(s.x)}, {"xi", arr(s.xi)}, {"K", arr(s.K)}};
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << j.dump(1) << '\n';
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  const std::string in((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  Snapshot s;
  if (in.size() >= 8 && std::memcmp(in.data(), kMagic, 8) == 0) {
    std::size_t pos = 8;
    const auto ver = get<std::uint32_t>(in, pos);
    if (ver != Snapshot::kVersion) throw std::runtime_error("snapshot: unsupported version");
    s.role = role_from(get<std::uint32_t>(in, pos));
    const auto n = get<std::uint64_t>(in, pos);
    s.r_N = get<double>(in, pos);
    s.dt = get<double>(in, pos);
    s.t = get<double>(in, pos);
    s.seed = get<std::uint64_t>(in, pos);
    for (auto* arr : {&s.x, &s.xi, &s.K}) {
      arr->resize(n);
      for (Vec3& v : *arr)
        for (int c = 0; c < 3; ++c) v[c] = get<double>(in, pos);
    }
    if (pos != in.size()) throw std::runtime_error("snapshot: trailing bytes");
    return s;
  }
  const nlohmann::json j = nlohmann::json::parse(in);
  if (j.at("format") != "vlamax.snapshot" || j.at("version") != Snapshot::kVersion)
    throw std::runtime_error("snapshot: not a vlamax snapshot");
  s.role = role_from(j.at("role").get<std::string>());
  s.r_N = j.at("r_N");
  s.dt = j.at("dt");
  s.t = j.at("t");
  s.seed = j.at("seed");
  for (auto [key, arr] : {std::pair{"x", &s.x}, std::pair{"xi", &s.xi}, std::pair{"K", &s.K}})
    for (const auto& v : j.at(key)) arr->push_back(Vec3(v.at(0), v.at(1), v.at(2)));
  if (s.xi.size() != s.x.size() || s.K.size() != s.x.size()) throw std::runtime_error("snapshot: array sizes differ");
  return s;
}

}  // namespace vlamax
