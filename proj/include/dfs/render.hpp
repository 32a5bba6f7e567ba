#pragma once
#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "dfs/camera.hpp"
#include "dfs/convolve.hpp"
#include "dfs/image.hpp"
#include "dfs/psf.hpp"

namespace dfs {

// The blur kernel a camera applies to scene content at the given depth.
// Diameters are snapped to the quantization grid (see quantize_diameter_px)
// so every route to the same geometry builds the same kernel.
template <class S>
Plane<S> kernel_for_depth(const CameraSettings<S>& cam, S depth_m) {
  return disk_psf<S>(quantize_diameter_px(double(coc_diameter_px(cam, depth_m))));
}

// Defocused image of a fronto-parallel plane: every pixel shares one depth,
// so the render is a single convolution of the sharp image.
template <class S>
Image<S> render_single_plane(const Image<S>& all_in_focus, const CameraSettings<S>& cam,
                             S depth_m, Boundary boundary = Boundary::replicate) {
  cam.validate();
  const Plane<S> k = kernel_for_depth(cam, depth_m);
  Image<S> out;
  for (const auto& p : all_in_focus.planes) out.planes.push_back(convolve2d(p, k, boundary));
  return out;
}

// Depth layers for a layered render: the sorted unique depths if there are
// at most max_layers of them, else max_layers values evenly spaced over the
// depth range (each pixel later maps to its nearest layer).
template <class S>
std::vector<S> choose_layers(const Plane<S>& depth_m, int max_layers) {
  std::set<S> uniq(depth_m.data(), depth_m.data() + depth_m.size());
  if (int(uniq.size()) <= max_layers) return std::vector<S>(uniq.begin(), uniq.end());
  const S lo = *uniq.begin(), hi = *uniq.rbegin();
  std::vector<S> layers(max_layers);
  for (int i = 0; i < max_layers; ++i)
    layers[i] = lo + (hi - lo) * S(i) / S(max_layers - 1);
  return layers;
}

// Layered defocus render. The scene is quantized to fronto-parallel layers;
// each layer's premultiplied color and coverage are blurred by that depth's
// kernel and composited back to front:  acc = C̃ + (1 − Ã)·acc.  The color
// accumulator is finally divided by the composited coverage (normalized
// alpha) so regions where differently-blurred coverages overlap or fall
// short still integrate to the right brightness — in particular a constant
// scene renders to the same constant.  A single layer reduces to
// render_single_plane exactly.
template <class S>
Image<S> render_defocused(const Image<S>& all_in_focus, const Plane<S>& depth_m,
                          const CameraSettings<S>& cam, const std::vector<S>& layers,
                          Boundary boundary = Boundary::replicate) {
  cam.validate();
  if (layers.empty()) throw std::invalid_argument("render_defocused: no layers");
  if (depth_m.rows() != all_in_focus.height() || depth_m.cols() != all_in_focus.width())
    throw std::invalid_argument("render_defocused: depth/image shape mismatch");
  if (layers.size() == 1) return render_single_plane(all_in_focus, cam, layers[0], boundary);

  const int h = all_in_focus.height(), w = all_in_focus.width(), nc = all_in_focus.channels();
  // nearest-layer assignment
  Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic> idx(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int best = 0;
      S bestd = std::abs(depth_m(y, x) - layers[0]);
      for (int l = 1; l < int(layers.size()); ++l) {
        const S d = std::abs(depth_m(y, x) - layers[l]);
        if (d < bestd) {
          bestd = d;
          best = l;
        }
      }
      idx(y, x) = best;
    }

  std::vector<Plane<S>> acc(nc, Plane<S>::Zero(h, w));
  Plane<S> coverage = Plane<S>::Zero(h, w);
  // far to near: later (nearer) layers occlude what is behind them
  for (int l = int(layers.size()) - 1; l >= 0; --l) {
    Plane<S> alpha = (idx == l).template cast<S>();
    if ((alpha == S(0)).all()) continue;
    const Plane<S> k = kernel_for_depth(cam, layers[l]);
    const Plane<S> alpha_b = convolve2d(alpha, k, boundary);
    for (int c = 0; c < nc; ++c) {
      const Plane<S> color_b = convolve2d(Plane<S>(all_in_focus[c] * alpha), k, boundary);
      acc[c] = color_b + (S(1) - alpha_b) * acc[c];
    }
    coverage = alpha_b + (S(1) - alpha_b) * coverage;
  }
  // Coverage is bounded away from zero (each pixel's own layer contributes at
  // least the kernel's center weight); the floor only guards degenerate input.
  const Plane<S> safe_cov = coverage.max(S(1e-12));
  Image<S> out;
  out.planes.reserve(static_cast<size_t>(nc));
  for (int c = 0; c < nc; ++c) out.planes.push_back(Plane<S>(acc[c] / safe_cov));
  return out;
}

// Render the focal stack: one defocused image per focus distance, sharing
// the scene, optics, and boundary model.
template <class S>
FocalStack<S> render_focal_stack(const Image<S>& all_in_focus, const Plane<S>& depth_m,
                                 const CameraSettings<S>& optics, const std::vector<S>& focus_m,
                                 int max_layers = 64, Boundary boundary = Boundary::replicate) {
  const std::vector<S> layers = choose_layers(depth_m, max_layers);
  FocalStack<S> stack;
  for (S df : focus_m) {
    CameraSettings<S> cam = optics;
    cam.focus_distance_m = df;
    stack.images.push_back(render_defocused(all_in_focus, depth_m, cam, layers, boundary));
    stack.focus_m.push_back(df);
  }
  stack.validate();
  return stack;
}

}  // namespace dfs
