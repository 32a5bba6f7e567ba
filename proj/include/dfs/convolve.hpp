#pragma once
#include <stdexcept>
#include <string>

#include "dfs/fft.hpp"
#include "dfs/image.hpp"

namespace dfs {

// How samples outside the raster are synthesized.
enum class Boundary { replicate, reflect, wrap, zero };

inline const char* to_string(Boundary b) {
  switch (b) {
    case Boundary::replicate: return "replicate";
    case Boundary::reflect: return "reflect";
    case Boundary::wrap: return "wrap";
    case Boundary::zero: return "zero";
  }
  return "?";
}

inline Boundary boundary_from_string(const std::string& s) {
  if (s == "replicate") return Boundary::replicate;
  if (s == "reflect") return Boundary::reflect;
  if (s == "wrap") return Boundary::wrap;
  if (s == "zero") return Boundary::zero;
  throw std::invalid_argument("unknown boundary mode: " + s);
}

// Map an out-of-range index into [0, n) per the boundary rule; -1 = outside
// (zero mode). Reflection is half-sample symmetric (edge value repeats).
inline int map_index(int i, int n, Boundary b) {
  if (0 <= i && i < n) return i;
  switch (b) {
    case Boundary::replicate: return i < 0 ? 0 : n - 1;
    case Boundary::reflect: {
      const int p = 2 * n;
      int j = ((i % p) + p) % p;
      return j < n ? j : p - 1 - j;
    }
    case Boundary::wrap: return ((i % n) + n) % n;
    case Boundary::zero: return -1;
  }
  return -1;
}

// Extend a plane by the boundary rule: output(top + y, left + x) = input(y, x).
template <class S>
Plane<S> pad_plane(const Plane<S>& img, int top, int bottom, int left, int right, Boundary b) {
  const int h = int(img.rows()), w = int(img.cols());
  Plane<S> out(h + top + bottom, w + left + right);
  for (int y = 0; y < int(out.rows()); ++y) {
    const int sy = map_index(y - top, h, b);
    for (int x = 0; x < int(out.cols()); ++x) {
      const int sx = map_index(x - left, w, b);
      out(y, x) = (sy < 0 || sx < 0) ? S(0) : img(sy, sx);
    }
  }
  return out;
}

namespace detail {

template <class S>
Plane<S> convolve_direct(const Plane<S>& img, const Plane<S>& k, Boundary b) {
  const int h = int(img.rows()), w = int(img.cols());
  const int R = int(k.rows()) / 2;
  Plane<S> out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      S acc = S(0);
      for (int dy = -R; dy <= R; ++dy) {
        const int sy = map_index(y - dy, h, b);
        if (sy < 0) continue;
        for (int dx = -R; dx <= R; ++dx) {
          const int sx = map_index(x - dx, w, b);
          if (sx < 0) continue;
          acc += k(dy + R, dx + R) * img(sy, sx);
        }
      }
      out(y, x) = acc;
    }
  return out;
}

template <class S>
Plane<S> convolve_fft(const Plane<S>& img, const Plane<S>& k, Boundary b) {
  const int h = int(img.rows()), w = int(img.cols());
  const int R = int(k.rows()) / 2;
  if (b == Boundary::wrap) {
    // periodic image: convolve at native size, no padding
    ComplexMat<S> spec = fft2(img).cwiseProduct(fft2(embed_kernel(k, h, w)));
    return ifft2_real(spec);
  }
  // Pad by R per the boundary rule (extra fill to a fast FFT length changes
  // nothing inside the crop: contamination travels at most R cells).
  const int ph = next_smooth(h + 2 * R), pw = next_smooth(w + 2 * R);
  Plane<S> p = pad_plane(img, R, ph - h - R, R, pw - w - R, b);
  ComplexMat<S> spec = fft2(p).cwiseProduct(fft2(embed_kernel(k, ph, pw)));
  Plane<S> full = ifft2_real(spec);
  return full.block(R, R, h, w);
}

}  // namespace detail

// 2-D convolution with an odd-sided kernel. Small kernels run the direct
// sum; larger ones go through padded FFTs. The path depends only on kernel
// size, so results are reproducible run to run.
template <class S>
Plane<S> convolve2d(const Plane<S>& img, const Plane<S>& k, Boundary b = Boundary::replicate) {
  if (k.rows() != k.cols() || k.rows() % 2 == 0)
    throw std::invalid_argument("convolve2d: kernel must be odd-sided square");
  if (k.rows() == 1) return img * k(0, 0);
  if (b == Boundary::wrap && (k.rows() > img.rows() || k.cols() > img.cols()))
    throw std::invalid_argument("convolve2d: wrap kernel larger than image");
  if (k.rows() <= 7) return detail::convolve_direct(img, k, b);
  return detail::convolve_fft(img, k, b);
}

// Normalized 2-D Gaussian window; radius 0 gives the 1×1 identity.
template <class S = double>
Plane<S> gaussian_window(int radius, double sigma) {
  if (radius < 0) throw std::invalid_argument("gaussian_window: negative radius");
  if (radius == 0) {
    Plane<S> k(1, 1);
    k(0, 0) = S(1);
    return k;
  }
  if (!(sigma > 0)) throw std::invalid_argument("gaussian_window: sigma must be > 0");
  const int side = 2 * radius + 1;
  Plane<double> k(side, side);
  for (int y = -radius; y <= radius; ++y)
    for (int x = -radius; x <= radius; ++x)
      k(y + radius, x + radius) = std::exp(-(y * y + x * x) / (2.0 * sigma * sigma));
  k /= k.sum();
  return k.template cast<S>();
}

}  // namespace dfs
