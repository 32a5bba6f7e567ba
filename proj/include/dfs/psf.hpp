#pragma once
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dfs/image.hpp"

namespace dfs {
namespace detail {

// Antiderivative of sqrt(r^2 - x^2), clamped to the circle's extent.
inline double circle_antideriv(double x, double r) {
  x = std::clamp(x, -r, r);
  return 0.5 * (x * std::sqrt(std::max(0.0, r * r - x * x)) + r * r * std::asin(x / r));
}

}  // namespace detail

// Exact area of disk(origin, radius r) ∩ [x0,x1]×[y0,y1], by integrating the
// clipped chord height over x. Breakpoints where the circle crosses y0/y1
// split the integral into pieces whose top/bottom are either the cap arc
// (use the antiderivative) or the box edge (rectangle). |y| == r tangency
// points are included so edge-touching cells classify correctly.
inline double disk_cell_area(double r, double x0, double x1, double y0, double y1) {
  const double xa = std::max(x0, -r), xb = std::min(x1, r);
  if (!(r > 0.0) || xa >= xb) return 0.0;
  double bps[6] = {xa, xb};
  int nb = 2;
  for (double y : {y0, y1}) {
    if (std::abs(y) <= r) {
      const double c = std::sqrt(std::max(0.0, r * r - y * y));
      for (double s : {-c, c})
        if (xa < s && s < xb) bps[nb++] = s;
    }
  }
  std::sort(bps, bps + nb);
  double total = 0.0;
  for (int i = 0; i + 1 < nb; ++i) {
    const double a = bps[i], b = bps[i + 1];
    const double m = 0.5 * (a + b);
    const double s = std::sqrt(std::max(0.0, r * r - m * m));
    const double top = std::min(y1, s), bot = std::max(y0, -s);
    if (top <= bot) continue;
    const double cap = detail::circle_antideriv(b, r) - detail::circle_antideriv(a, r);
    total += (s < y1 ? cap : y1 * (b - a)) - (-s > y0 ? -cap : y0 * (b - a));
  }
  return total;
}

// Uniform disk PSF of the given diameter (pixels), rasterized by exact
// per-cell area coverage and normalized to unit sum. Diameters below one
// pixel collapse to the 1×1 identity kernel. The kernel is built from one
// octant and mirrored, so its eightfold symmetry is bitwise.
template <class S = double>
Plane<S> disk_psf(double diameter_px) {
  if (!(diameter_px >= 0.0)) throw std::invalid_argument("disk_psf: bad diameter");
  if (diameter_px < 1.0) {
    Plane<S> k(1, 1);
    k(0, 0) = S(1);
    return k;
  }
  const double r = diameter_px / 2.0;
  const int R = int(std::ceil(r - 0.5));
  const int side = 2 * R + 1;
  Plane<double> k(side, side);
  for (int dy = 0; dy <= R; ++dy)
    for (int dx = dy; dx <= R; ++dx) {
      // canonical (dx >= dy >= 0) evaluation keeps diagonal mirrors bitwise
      const double a =
          disk_cell_area(r, dx - 0.5, dx + 0.5, dy - 0.5, dy + 0.5);
      const int px = R + dx, mx = R - dx, py = R + dy, my = R - dy;
      k(py, px) = k(py, mx) = k(my, px) = k(my, mx) = a;
      k(px, py) = k(mx, py) = k(px, my) = k(mx, my) = a;
    }
  k /= k.sum();
  return k.template cast<S>();
}

// Midpoint supersampling rasterizer; slow reference used by tests only.
template <class S = double>
Plane<S> disk_psf_supersampled(double diameter_px, int n) {
  if (diameter_px < 1.0) {
    Plane<S> k(1, 1);
    k(0, 0) = S(1);
    return k;
  }
  const double r = diameter_px / 2.0;
  const int R = int(std::ceil(r - 0.5));
  const int side = 2 * R + 1;
  Plane<double> k = Plane<double>::Zero(side, side);
  for (int dy = -R; dy <= R; ++dy)
    for (int dx = -R; dx <= R; ++dx) {
      long hits = 0;
      for (int sy = 0; sy < n; ++sy)
        for (int sx = 0; sx < n; ++sx) {
          const double x = dx + (sx + 0.5) / n - 0.5;
          const double y = dy + (sy + 0.5) / n - 0.5;
          if (x * x + y * y <= r * r) ++hits;
        }
      k(dy + R, dx + R) = double(hits) / (double(n) * n);
    }
  k /= k.sum();
  return k.template cast<S>();
}

}  // namespace dfs
