#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "dfs/io.hpp"

namespace dfs::io {
namespace {

constexpr char kMagic[4] = {'D', 'F', 'C', 'V'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kFlagSquashed = 1u << 0;
constexpr std::uint32_t kFlagNormalized = 1u << 1;

#pragma pack(push, 1)
struct Header {
  char magic[4];
  std::uint32_t version;
  std::uint32_t width, height, depth_count;
  std::uint32_t flags;
  double c_max, f1;
  std::uint8_t reserved[24];
};
#pragma pack(pop)
static_assert(sizeof(Header) == 64, "volume header must be 64 bytes");

}  // namespace

void write_volume(const std::string& path, const CostVolume& vol) {
  if (vol.slices.empty()) throw std::invalid_argument("volume: nothing to write");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("volume: cannot write " + path);
  Header h{};
  std::memcpy(h.magic, kMagic, 4);
  h.version = kVersion;
  h.width = std::uint32_t(vol.width);
  h.height = std::uint32_t(vol.height);
  h.depth_count = std::uint32_t(vol.depth_count());
  h.flags = (vol.squashed ? kFlagSquashed : 0u) | (vol.normalized ? kFlagNormalized : 0u);
  h.c_max = vol.c_max;
  h.f1 = vol.f1;
  out.write(reinterpret_cast<const char*>(&h), sizeof(h));
  out.write(reinterpret_cast<const char*>(vol.hypotheses_m.data()),
            std::streamsize(vol.hypotheses_m.size() * sizeof(double)));
  std::vector<float> row(size_t(vol.width));
  for (const auto& slice : vol.slices)
    for (int y = 0; y < vol.height; ++y) {
      for (int x = 0; x < vol.width; ++x) row[size_t(x)] = slice(y, x);
      out.write(reinterpret_cast<const char*>(row.data()),
                std::streamsize(row.size() * sizeof(float)));
    }
  if (!out) throw std::runtime_error("volume: write failed for " + path);
}

CostVolume read_volume(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("volume: cannot open " + path);
  Header h{};
  in.read(reinterpret_cast<char*>(&h), sizeof(h));
  if (!in || std::memcmp(h.magic, kMagic, 4) != 0)
    throw std::runtime_error("volume: bad magic in " + path);
  if (h.version != kVersion) throw std::runtime_error("volume: unsupported version in " + path);
  if (h.width == 0 || h.height == 0 || h.depth_count == 0)
    throw std::runtime_error("volume: empty dimensions in " + path);
  CostVolume vol;
  vol.width = int(h.width);
  vol.height = int(h.height);
  vol.c_max = h.c_max;
  vol.f1 = h.f1;
  vol.squashed = (h.flags & kFlagSquashed) != 0;
  vol.normalized = (h.flags & kFlagNormalized) != 0;
  vol.hypotheses_m.resize(h.depth_count);
  in.read(reinterpret_cast<char*>(vol.hypotheses_m.data()),
          std::streamsize(vol.hypotheses_m.size() * sizeof(double)));
  std::vector<float> row(size_t(h.width));
  vol.slices.assign(h.depth_count, Plane<float>(int(h.height), int(h.width)));
  for (auto& slice : vol.slices)
    for (int y = 0; y < int(h.height); ++y) {
      in.read(reinterpret_cast<char*>(row.data()), std::streamsize(row.size() * sizeof(float)));
      for (int x = 0; x < int(h.width); ++x) slice(y, x) = row[size_t(x)];
    }
  if (!in) throw std::runtime_error("volume: truncated data in " + path);
  return vol;
}

}  // namespace dfs::io
