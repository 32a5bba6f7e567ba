#pragma once
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "dfs/camera.hpp"
#include "dfs/convolve.hpp"
#include "dfs/fft.hpp"
#include "dfs/image.hpp"
#include "dfs/parallel.hpp"
#include "dfs/psf.hpp"
#include "dfs/wiener.hpp"

namespace dfs {

// D depth hypotheses uniformly spaced over [lo, hi].
inline std::vector<double> uniform_hypotheses(double lo, double hi, int count) {
  if (!(lo > 0) || !(hi > lo) || count < 2)
    throw std::invalid_argument("uniform_hypotheses: need 0 < lo < hi, count >= 2");
  std::vector<double> h(count);
  for (int k = 0; k < count; ++k) h[k] = lo + (hi - lo) * k / double(count - 1);
  return h;
}

inline std::vector<double> default_hypotheses() { return uniform_hypotheses(0.1, 3.0, 64); }

// Plane-sweep cost volume: slices[k](y, x) is the defocus-consistency cost
// of hypothesis depth hypotheses_m[k] at pixel (x, y). Slices are stored in
// float; hypotheses stay double.
struct CostVolume {
  int width = 0, height = 0;
  std::vector<double> hypotheses_m;
  std::vector<Plane<float>> slices;
  double c_max = 0.3, f1 = 0.999;  // squash calibration stored with the volume
  bool squashed = false, normalized = false;

  int depth_count() const { return int(slices.size()); }
};

struct CostParams {
  double reg_weight = 1e-3;   // Wiener smoothness weight λ
  int window_radius = 2;      // 0 disables spatial pooling (1×1 window)
  double gaussian_sigma = 1.0;
  double c_max = 0.3;         // squash calibration: f(c_max) = f1
  double f1 = 0.999;
  bool squash = true;
  bool normalize = true;
  int margin = -1;            // deconvolution pad margin; -1 auto, 0 periodic
  bool taper = true;          // taper the pad band (margin > 0 only)
};

// Squash slope a with f(x) = tanh(a·x) calibrated so f(c_max) = f1.
inline double squash_coefficient(double c_max, double f1) {
  if (!(c_max > 0) || !(f1 > 0) || !(f1 < 1))
    throw std::invalid_argument("squash_coefficient: need c_max > 0, f1 in (0,1)");
  return std::log((1.0 + f1) / (1.0 - f1)) / (2.0 * c_max);
}

// Monotone squash of large costs: outliers beyond c_max compress toward 1,
// small costs keep nearly linear resolution.
inline void apply_squash(CostVolume& vol) {
  if (vol.squashed) return;
  const double a = squash_coefficient(vol.c_max, vol.f1);
  for (auto& s : vol.slices)
    s = s.unaryExpr([a](float v) { return float(std::tanh(a * double(v))); });
  vol.squashed = true;
}

// Per-pixel min-max normalization across hypotheses. Degenerate pixels
// (range below 1e-12) become 0.5 — no hypothesis is preferred there.
inline void apply_normalize(CostVolume& vol) {
  if (vol.normalized || vol.slices.empty()) return;
  const int d = vol.depth_count();
  for (int y = 0; y < vol.height; ++y)
    for (int x = 0; x < vol.width; ++x) {
      double mn = vol.slices[0](y, x), mx = mn;
      for (int k = 1; k < d; ++k) {
        const double v = vol.slices[k](y, x);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
      }
      const double range = mx - mn;
      for (int k = 0; k < d; ++k)
        vol.slices[k](y, x) =
            range < 1e-12 ? 0.5f : float((vol.slices[k](y, x) - mn) / range);
    }
  vol.normalized = true;
}

namespace detail {

// Kernels for every (image, hypothesis) pair, deduplicated by quantized
// diameter so equal blur is bit-equal kernel.
template <class S>
struct KernelBank {
  std::map<long long, Plane<double>> by_key;
  std::vector<std::vector<long long>> key;  // [image][hypothesis]
  int max_radius = 0;

  KernelBank(const CameraSettings<S>& optics, const std::vector<S>& focus_m,
             const std::vector<double>& hyps) {
    key.resize(focus_m.size());
    for (size_t i = 0; i < focus_m.size(); ++i) {
      CameraSettings<S> cam = optics;
      cam.focus_distance_m = focus_m[i];
      cam.validate();
      key[i].resize(hyps.size());
      for (size_t k = 0; k < hyps.size(); ++k) {
        const double diam = quantize_diameter_px(double(coc_diameter_px(cam, S(hyps[k]))));
        const long long id = std::llround(diam * 1e6);
        key[i][k] = id;
        auto [it, inserted] = by_key.try_emplace(id);
        if (inserted) {
          it->second = disk_psf<double>(diam);
          max_radius = std::max(max_radius, int(it->second.rows()) / 2);
        }
      }
    }
  }
  const Plane<double>& kernel(int image, int hyp) const { return by_key.at(key[image][hyp]); }
};

inline void validate_sweep_inputs(const std::vector<double>& hypotheses,
                                  const CostParams& params) {
  if (hypotheses.empty()) throw std::invalid_argument("cost sweep: no hypotheses");
  for (size_t k = 1; k < hypotheses.size(); ++k)
    if (!(hypotheses[k] > hypotheses[k - 1]))
      throw std::invalid_argument("cost sweep: hypotheses must be increasing");
  if (!(hypotheses.front() > 0))
    throw std::invalid_argument("cost sweep: hypotheses must be positive");
  if (params.window_radius < 0 || !(params.gaussian_sigma > 0) || !(params.reg_weight > 0))
    throw std::invalid_argument("cost sweep: bad cost params");
}

// Everything slice evaluation needs, precomputed once per sweep and then
// only read: padded-tile geometry, kernels, forward spectra of every
// (image, channel), the regularizer spectrum, and the pooling window.
// Slices computed from one context are bitwise reproducible in any order.
template <class S>
struct SweepContext {
  const FocalStack<S>* stack;
  CostParams params;
  int w, h, nf, nc;
  int margin, top = 0, left = 0, th, tw;
  KernelBank<S> bank;
  std::vector<ComplexMat<double>> spectra;  // [image * nc + channel]
  Plane<double> L2, window;

  SweepContext(const FocalStack<S>& st, const CameraSettings<S>& optics,
               const std::vector<double>& hypotheses, const CostParams& p)
      : stack(&st),
        params(p),
        w(st.images[0].width()),
        h(st.images[0].height()),
        nf(st.size()),
        nc(st.images[0].channels()),
        bank(optics, st.focus_m, hypotheses) {
    margin = params.margin >= 0 ? params.margin : auto_margin(bank.max_radius, h, w);
    th = h;
    tw = w;
    if (margin > 0) {
      th = next_smooth(h + 2 * margin);
      tw = next_smooth(w + 2 * margin);
      top = left = margin;
    }
    if (2 * bank.max_radius + 1 > th || 2 * bank.max_radius + 1 > tw)
      throw std::invalid_argument("cost sweep: kernel exceeds padded tile");

    spectra.resize(size_t(nf) * nc);
    for (int i = 0; i < nf; ++i)
      for (int c = 0; c < nc; ++c) {
        Plane<double> tile;
        if (margin == 0) {
          tile = st.images[i][c].template cast<double>();
        } else {
          tile = pad_plane(Plane<double>(st.images[i][c].template cast<double>()), top,
                           th - h - top, left, tw - w - left, Boundary::reflect);
          if (params.taper) taper_to_mean(tile, margin / 2);
        }
        spectra[size_t(i) * nc + c] = fft2(tile);
      }
    L2 = laplacian_power_spectrum<double>(th, tw);
    window = gaussian_window<double>(params.window_radius, params.gaussian_sigma);
  }

  // Raw (un-squashed) cost of hypothesis k: deconvolve every stack image
  // with its hypothesis kernel, then per channel pool the pixelwise
  // variance across the deconvolved images and accumulate the channel
  // standard deviations.
  Plane<double> raw_slice(int k) const {
    const size_t n_images = size_t(nf);
    std::vector<Plane<double>> deconv(n_images);
    Plane<double> cost = Plane<double>::Zero(h, w);
    for (int c = 0; c < nc; ++c) {
      for (int i = 0; i < nf; ++i) {
        const Plane<double>& psf = bank.kernel(i, k);
        if (psf.rows() == 1) {
          // identity blur: deconvolution is an exact copy
          deconv[size_t(i)] = stack->images[i][c].template cast<double>();
          continue;
        }
        const ComplexMat<double> H = fft2(embed_kernel(psf, th, tw));
        const ComplexMat<double>& Y = spectra[size_t(i) * nc + c];
        ComplexMat<double> X(th, tw);
        for (int xx = 0; xx < tw; ++xx)
          for (int yy = 0; yy < th; ++yy) {
            const std::complex<double> hv = H(yy, xx);
            X(yy, xx) =
                std::conj(hv) * Y(yy, xx) / (std::norm(hv) + params.reg_weight * L2(yy, xx));
          }
        Plane<double> full = ifft2_real(X);
        deconv[size_t(i)] = margin == 0 ? full : Plane<double>(full.block(top, left, h, w));
      }
      Plane<double> mean = Plane<double>::Zero(h, w);
      for (int i = 0; i < nf; ++i) mean += deconv[size_t(i)];
      mean /= double(nf);
      Plane<double> var = Plane<double>::Zero(h, w);
      for (int i = 0; i < nf; ++i) var += (deconv[size_t(i)] - mean).square();
      var /= double(nf);
      const Plane<double> pooled =
          params.window_radius > 0 ? convolve2d(var, window, Boundary::replicate) : var;
      cost += pooled.max(0.0).sqrt();
    }
    return cost;
  }
};

}  // namespace detail

// One raw cost slab: the un-squashed, un-normalized cost of a single
// hypothesis depth. If the hypothesis is right, the deconvolved images
// agree on the latent sharp image and the cost vanishes.
template <class S>
Plane<double> raw_cost_slice(const FocalStack<S>& stack, const CameraSettings<S>& optics,
                             double hypothesis_depth_m, const CostParams& params) {
  stack.validate();
  const std::vector<double> hyps{hypothesis_depth_m};
  detail::validate_sweep_inputs(hyps, params);
  return detail::SweepContext<S>(stack, optics, hyps, params).raw_slice(0);
}

// Build the full cost volume: raw slices over all hypotheses, then squash
// and (if params say so) per-pixel normalization.
//
// Slices are computed in parallel over hypotheses; every slice depends only
// on the read-only sweep context, so the volume is bitwise identical for
// any thread budget and any slice ordering.
template <class S>
CostVolume build_cost_volume(const FocalStack<S>& stack, const CameraSettings<S>& optics,
                             const std::vector<double>& hypotheses, const CostParams& params,
                             int threads = 1) {
  stack.validate();
  detail::validate_sweep_inputs(hypotheses, params);
  const detail::SweepContext<S> ctx(stack, optics, hypotheses, params);
  const int nd = int(hypotheses.size());

  CostVolume vol;
  vol.width = ctx.w;
  vol.height = ctx.h;
  vol.hypotheses_m = hypotheses;
  vol.c_max = params.c_max;
  vol.f1 = params.f1;
  vol.slices.assign(size_t(nd), Plane<float>());

  parallel_for(nd, threads,
               [&](int k) { vol.slices[size_t(k)] = ctx.raw_slice(k).template cast<float>(); });

  if (params.squash) apply_squash(vol);
  if (params.normalize) apply_normalize(vol);
  return vol;
}

}  // namespace dfs
