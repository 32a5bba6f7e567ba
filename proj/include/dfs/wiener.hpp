#pragma once
#include <algorithm>
#include <cmath>

#include "dfs/convolve.hpp"
#include "dfs/fft.hpp"
#include "dfs/image.hpp"

namespace dfs {

// |DFT of the 5-point discrete Laplacian|² on a rows×cols grid — the
// smoothness penalty spectrum of the regularized inverse filter.
template <class S = double>
Plane<S> laplacian_power_spectrum(int rows, int cols) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  Plane<double> out(rows, cols);
  Eigen::ArrayXd ly(rows), lx(cols);
  for (int i = 0; i < rows; ++i) ly(i) = 2.0 * std::cos(kTwoPi * i / rows) - 2.0;
  for (int i = 0; i < cols; ++i) lx(i) = 2.0 * std::cos(kTwoPi * i / cols) - 2.0;
  for (int y = 0; y < rows; ++y)
    for (int x = 0; x < cols; ++x) {
      const double l = ly(y) + lx(x);
      out(y, x) = l * l;
    }
  return out.template cast<S>();
}

// Ease the outermost `band` ring of a padded tile toward the tile mean with
// a raised-cosine ramp; softens the periodic seam the FFT implies.
template <class S>
void taper_to_mean(Plane<S>& tile, int band) {
  if (band <= 0) return;
  const int h = int(tile.rows()), w = int(tile.cols());
  const S mean = tile.mean();
  auto ramp = [band](int d) {
    if (d >= band) return 1.0;
    return 0.5 * (1.0 - std::cos(M_PI * double(d) / band));
  };
  for (int y = 0; y < h; ++y) {
    const double ry = ramp(std::min(y, h - 1 - y));
    for (int x = 0; x < w; ++x) {
      const double wgt = std::min(ry, ramp(std::min(x, w - 1 - x)));
      tile(y, x) = mean + S(wgt) * (tile(y, x) - mean);
    }
  }
}

// Default reflect-pad margin for a kernel of radius R: wide enough that the
// inverse filter's ringing from the periodic seam decays before the crop.
inline int auto_margin(int kernel_radius, int rows, int cols) {
  return std::min({std::max(16, 8 * kernel_radius), rows, cols});
}

// Wiener–Hunt deconvolution: X = conj(H)·Y / (|H|² + λ|L|²) with the
// Laplacian smoothness prior. margin < 0 selects the automatic reflect-pad
// margin; margin 0 treats the image as periodic (no padding); margin > 0
// reflect-pads by that amount (plus optional taper of the outer half-band).
// The restored tile is clamped to [0,1] at this API boundary unless the
// caller asks for raw values (the cost sweep wants the unclamped residual
// structure). A 1×1 PSF returns the input unchanged — the formula would
// otherwise shave high frequencies by λ|L|²/(1+λ|L|²) even for an identity
// kernel.
template <class S>
Plane<S> wiener_deconvolve(const Plane<S>& img, const Plane<S>& psf, double reg_weight,
                           int margin = -1, bool taper = true, bool clamp_output = true) {
  if (psf.rows() != psf.cols() || psf.rows() % 2 == 0)
    throw std::invalid_argument("wiener_deconvolve: PSF must be odd-sided square");
  if (!(reg_weight > 0)) throw std::invalid_argument("wiener_deconvolve: reg weight must be > 0");
  if (psf.rows() == 1) return clamp_output ? Plane<S>(img.min(S(1)).max(S(0))) : img;
  const int h = int(img.rows()), w = int(img.cols());
  const int R = int(psf.rows()) / 2;
  if (margin < 0) margin = auto_margin(R, h, w);

  Plane<S> tile;
  int top = 0, left = 0;
  if (margin == 0) {
    tile = img;
  } else {
    const int ph = next_smooth(h + 2 * margin), pw = next_smooth(w + 2 * margin);
    top = margin;
    left = margin;
    tile = pad_plane(img, top, ph - h - top, left, pw - w - left, Boundary::reflect);
    if (taper) taper_to_mean(tile, margin / 2);
  }
  const int th = int(tile.rows()), tw = int(tile.cols());
  if (psf.rows() > th || psf.cols() > tw)
    throw std::invalid_argument("wiener_deconvolve: PSF larger than padded tile");

  const ComplexMat<S> H = fft2(embed_kernel(Plane<S>(psf), th, tw));
  const ComplexMat<S> Y = fft2(tile);
  const Plane<S> L2 = laplacian_power_spectrum<S>(th, tw);
  ComplexMat<S> X(th, tw);
  for (int x = 0; x < tw; ++x)
    for (int y = 0; y < th; ++y) {
      const std::complex<S> hv = H(y, x);
      X(y, x) = std::conj(hv) * Y(y, x) / (std::norm(hv) + S(reg_weight) * L2(y, x));
    }
  Plane<S> full = ifft2_real(X);
  Plane<S> out = margin == 0 ? std::move(full) : Plane<S>(full.block(top, left, h, w));
  if (clamp_output) out = out.min(S(1)).max(S(0));
  return out;
}

// Per-channel deconvolution of a whole image.
template <class S>
Image<S> wiener_deconvolve(const Image<S>& img, const Plane<S>& psf, double reg_weight,
                           int margin = -1, bool taper = true, bool clamp_output = true) {
  Image<S> out;
  out.planes.reserve(img.planes.size());
  for (const auto& p : img.planes)
    out.planes.push_back(wiener_deconvolve(p, psf, reg_weight, margin, taper, clamp_output));
  return out;
}

}  // namespace dfs
