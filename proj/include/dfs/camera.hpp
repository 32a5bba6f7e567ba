#pragma once
#include <cmath>
#include <stdexcept>
#include <utility>

namespace dfs {

// Thin-lens camera description. px_per_m converts sensor meters to pixels
// (the reciprocal of the pixel pitch).
template <class S>
struct CameraSettings {
  S focus_distance_m;  // d_f: depth rendered perfectly sharp
  S focal_length_m;    // f
  S f_number;          // N = f / aperture diameter
  S px_per_m;          // b

  void validate() const {
    if (!(focal_length_m > S(0))) throw std::invalid_argument("camera: focal length must be > 0");
    if (!(f_number > S(0))) throw std::invalid_argument("camera: f-number must be > 0");
    if (!(px_per_m > S(0))) throw std::invalid_argument("camera: px_per_m must be > 0");
    if (!(focus_distance_m > focal_length_m))
      throw std::invalid_argument("camera: focus distance must exceed focal length");
  }
};

// Signed circle-of-confusion diameter in pixels: negative in front of the
// focal plane, positive behind, zero at d = focus distance.
// Affine in inverse depth: signed = A + B/d.
template <class S>
std::pair<S, S> coc_affine_coeffs(const CameraSettings<S>& cam) {
  cam.validate();
  const S A = cam.px_per_m * cam.focal_length_m * cam.focal_length_m /
              (cam.f_number * (cam.focus_distance_m - cam.focal_length_m));
  return {A, -A * cam.focus_distance_m};
}

namespace detail {
template <class S>
void require_depth(const CameraSettings<S>& cam, S depth_m) {
  cam.validate();
  if (!(depth_m > cam.focal_length_m) || !std::isfinite(static_cast<double>(depth_m)))
    throw std::domain_error("coc: depth must be finite and exceed the focal length");
}
}  // namespace detail

template <class S>
S coc_diameter_px(const CameraSettings<S>& cam, S depth_m) {
  detail::require_depth(cam, depth_m);
  return cam.px_per_m * (std::abs(depth_m - cam.focus_distance_m) / depth_m) *
         cam.focal_length_m * cam.focal_length_m /
         (cam.f_number * (cam.focus_distance_m - cam.focal_length_m));
}

template <class S>
S signed_coc_diameter_px(const CameraSettings<S>& cam, S depth_m) {
  detail::require_depth(cam, depth_m);
  const auto [A, B] = coc_affine_coeffs(cam);
  return A + B / depth_m;
}

// The blur-preserving reparameterization: the scaled settings at depth
// sigma*d produce the same CoC as the original at depth d.
// depth_scale_applied records whether the paired depth data (ground truth,
// hypotheses) has been multiplied by sigma yet; the transform itself only
// touches the camera.
template <class S>
struct ScaledSample {
  S scale;
  CameraSettings<S> settings;
  bool depth_scale_applied = false;
};

template <class S>
ScaledSample<S> scale_sample(const CameraSettings<S>& cam, S sigma) {
  cam.validate();
  if (!(sigma > S(0))) throw std::domain_error("scale_sample: sigma must be > 0");
  return {sigma,
          {cam.focus_distance_m * sigma, cam.focal_length_m * sigma, cam.f_number,
           cam.px_per_m / sigma},
          false};
}

// Snap a blur diameter to a 1e-6 px grid. Physically a sub-nanometer
// perturbation; numerically it makes kernel construction reproducible when
// the same geometry is reached through different arithmetic (e.g. the
// scale_sample route), so rescaled pipelines build bit-identical kernels.
inline double quantize_diameter_px(double diameter_px) {
  return std::round(diameter_px * 1e6) / 1e6;
}

}  // namespace dfs
