#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dfs/io.hpp"

static_assert(std::endian::native == std::endian::little,
              "PFM/volume I/O assumes a little-endian host");

namespace dfs::io {
namespace {

// Header tokens are whitespace-separated; a single whitespace byte follows
// the scale and then raw samples begin.
std::string next_token(std::istream& in) {
  std::string t;
  in >> t;
  if (!in) throw std::runtime_error("PFM: truncated header");
  return t;
}

}  // namespace

Imaged read_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("PFM: cannot open " + path);
  const std::string magic = next_token(in);
  if (magic != "PF" && magic != "Pf") throw std::runtime_error("PFM: bad magic in " + path);
  const int channels = magic == "PF" ? 3 : 1;
  const int w = std::stoi(next_token(in));
  const int h = std::stoi(next_token(in));
  const double scale = std::stod(next_token(in));
  if (w <= 0 || h <= 0) throw std::runtime_error("PFM: bad dimensions in " + path);
  in.get();  // the single whitespace after the scale
  std::vector<float> row(size_t(w) * channels);
  Imaged img(w, h, channels);
  for (int y = h - 1; y >= 0; --y) {  // bottom-up storage
    in.read(reinterpret_cast<char*>(row.data()), std::streamsize(row.size() * sizeof(float)));
    if (!in) throw std::runtime_error("PFM: truncated data in " + path);
    if (scale > 0)  // big-endian samples
      for (auto& v : row) {
        std::uint32_t u;
        std::memcpy(&u, &v, 4);
        u = __builtin_bswap32(u);
        std::memcpy(&v, &u, 4);
      }
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < channels; ++c) img[c](y, x) = row[size_t(x) * channels + c];
  }
  return img;
}

void write_pfm(const std::string& path, const Imaged& img) {
  img.require_consistent();
  if (img.channels() != 1 && img.channels() != 3)
    throw std::invalid_argument("PFM: only 1 or 3 channels");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("PFM: cannot write " + path);
  out << (img.channels() == 3 ? "PF" : "Pf") << "\n"
      << img.width() << " " << img.height() << "\n"
      << "-1.0\n";  // little-endian
  const int w = img.width(), h = img.height(), nc = img.channels();
  std::vector<float> row(size_t(w) * nc);
  for (int y = h - 1; y >= 0; --y) {
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < nc; ++c) row[size_t(x) * nc + c] = float(img[c](y, x));
    out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size() * sizeof(float)));
  }
  if (!out) throw std::runtime_error("PFM: write failed for " + path);
}

DepthMap read_depth_pfm(const std::string& path) {
  const Imaged img = read_pfm(path);
  if (img.channels() != 1) throw std::runtime_error("depth PFM must be single-channel: " + path);
  DepthMap m = DepthMap::allocate(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const double v = img[0](y, x);
      m.depth_m(y, x) = v;
      m.valid(y, x) = std::isfinite(v);
    }
  return m;
}

void write_depth_pfm(const std::string& path, const DepthMap& map) {
  Imaged img(map.width, map.height, 1);
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x)
      img[0](y, x) = map.valid(y, x) ? map.depth_m(y, x)
                                     : std::numeric_limits<double>::quiet_NaN();
  write_pfm(path, img);
}

}  // namespace dfs::io
