#pragma once
#include <cmath>
#include <random>

#include "dfs/convolve.hpp"
#include "dfs/fft.hpp"
#include "dfs/image.hpp"

namespace dfs {

// Deterministic standard normal via Box–Muller over mt19937_64 — identical
// streams on every platform (std::normal_distribution is not portable).
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : gen_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0,1], u2 in [0,1): 53-bit uniforms
    const double u1 = (double(gen_() >> 11) + 1.0) / 9007199254740993.0;
    const double u2 = double(gen_() >> 11) / 9007199254740992.0;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Gaussian white noise field, row-major fill order (y outer, x inner).
template <class S = double>
Plane<S> white_noise(int width, int height, std::uint64_t seed) {
  GaussianSampler g(seed);
  Plane<S> out(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) out(y, x) = S(g.next());
  return out;
}

// Signed frequency of DFT bin i (cycles per sample).
inline double dft_freq(int i, int n) { return (i < (n + 1) / 2 ? i : i - n) / double(n); }

// Band-limited noise texture: per channel, white noise is low-passed by a
// hard radial cutoff (cycles/pixel) in the DFT domain and range-mapped to
// [lo, hi]. Cutoff below the first MTF zero of the largest blur kernel in
// play keeps the texture recoverable by deconvolution.
template <class S = double>
Image<S> bandlimited_texture(int width, int height, std::uint64_t seed, double cutoff,
                             double lo, double hi, int channels = 3) {
  if (!(cutoff > 0) || !(hi > lo)) throw std::invalid_argument("bandlimited_texture: bad params");
  Image<S> img;
  for (int c = 0; c < channels; ++c) {
    ComplexMat<S> F = fft2(white_noise<S>(width, height, seed + 1000003 * std::uint64_t(c)));
    for (int x = 0; x < width; ++x) {
      const double fx = dft_freq(x, width);
      for (int y = 0; y < height; ++y) {
        const double fy = dft_freq(y, height);
        if (std::hypot(fy, fx) > cutoff) F(y, x) = std::complex<S>(0, 0);
      }
    }
    Plane<S> t = ifft2_real(F);
    const S mn = t.minCoeff(), mx = t.maxCoeff();
    img.planes.push_back(mx > mn ? Plane<S>(S(lo) + S(hi - lo) * (t - mn) / (mx - mn))
                                 : Plane<S>(Plane<S>::Constant(height, width, S(0.5 * (lo + hi)))));
  }
  return img;
}

template <class S = double>
Image<S> checkerboard(int width, int height, int period = 8, int channels = 3) {
  if (period <= 0) throw std::invalid_argument("checkerboard: period must be > 0");
  Plane<S> p(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) p(y, x) = S(((y / period) + (x / period)) % 2);
  Image<S> img;
  img.planes.assign(channels, p);
  return img;
}

// The procedural scene used by the verification workflows: band-limited
// noise whose cutoff (0.10 cyc/px) sits inside the invertible band of the
// largest kernel swept by the default hypothesis range.
template <class S = double>
Image<S> standard_texture(int width = 64, int height = 64, std::uint64_t seed = 7) {
  return bandlimited_texture<S>(width, height, seed, 0.10, 0.05, 0.95);
}

// Windowed standard deviation of a plane (box window of the given radius) —
// the texture-strength signal used to mask low-confidence regions.
template <class S>
Plane<S> local_contrast(const Plane<S>& luma, int radius = 2) {
  if (radius <= 0) return Plane<S>::Zero(luma.rows(), luma.cols());
  const int side = 2 * radius + 1;
  Plane<S> box = Plane<S>::Constant(side, side, S(1) / S(side * side));
  Plane<S> m = convolve2d(luma, box, Boundary::replicate);
  Plane<S> m2 = convolve2d(Plane<S>(luma * luma), box, Boundary::replicate);
  return (m2 - m * m).max(S(0)).sqrt();
}

// Additive Gaussian noise with a deterministic seed; values are left
// unclamped (linear-light processing tolerates slight excursions).
template <class S>
Image<S> add_gaussian_noise(const Image<S>& img, double sigma, std::uint64_t seed) {
  GaussianSampler g(seed);
  Image<S> out = img;
  for (auto& p : out.planes)
    for (int y = 0; y < p.rows(); ++y)
      for (int x = 0; x < p.cols(); ++x) p(y, x) += S(sigma * g.next());
  return out;
}

}  // namespace dfs
