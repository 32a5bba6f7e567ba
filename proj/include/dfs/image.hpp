#pragma once
#include <Eigen/Dense>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dfs {

// A single channel, indexed (y, x): rows = height, cols = width.
template <class S>
using Plane = Eigen::Array<S, Eigen::Dynamic, Eigen::Dynamic>;

// Multi-channel raster; all planes share one geometry.
template <class S>
struct Image {
  std::vector<Plane<S>> planes;

  Image() = default;
  Image(int width, int height, int channels, S fill = S(0)) {
    if (width <= 0 || height <= 0 || channels <= 0)
      throw std::invalid_argument("Image: non-positive dimensions");
    planes.assign(channels, Plane<S>::Constant(height, width, fill));
  }
  explicit Image(Plane<S> plane) { planes.push_back(std::move(plane)); }

  int width() const { return planes.empty() ? 0 : int(planes[0].cols()); }
  int height() const { return planes.empty() ? 0 : int(planes[0].rows()); }
  int channels() const { return int(planes.size()); }

  Plane<S>& operator[](int c) { return planes[c]; }
  const Plane<S>& operator[](int c) const { return planes[c]; }

  void require_consistent() const {
    for (const auto& p : planes)
      if (p.rows() != planes[0].rows() || p.cols() != planes[0].cols())
        throw std::invalid_argument("Image: mismatched plane shapes");
  }
};

using Imaged = Image<double>;

// Rec.601 luma from an RGB image (or a copy of the sole plane).
template <class S>
Plane<S> luminance(const Image<S>& img) {
  if (img.channels() == 1) return img[0];
  if (img.channels() < 3) throw std::invalid_argument("luminance: need 1 or >=3 channels");
  return S(0.299) * img[0] + S(0.587) * img[1] + S(0.114) * img[2];
}

// Focal stack: one image per focus distance, shared geometry.
template <class S>
struct FocalStack {
  std::vector<Image<S>> images;
  std::vector<S> focus_m;  // focus distance of each image, meters

  int size() const { return int(images.size()); }

  void validate() const {
    if (images.size() != focus_m.size())
      throw std::invalid_argument("FocalStack: image/focus count mismatch");
    if (images.size() < 2) throw std::invalid_argument("FocalStack: need at least 2 images");
    for (const auto& im : images) {
      im.require_consistent();
      if (im.width() != images[0].width() || im.height() != images[0].height() ||
          im.channels() != images[0].channels())
        throw std::invalid_argument("FocalStack: mismatched image geometry");
    }
    for (S d : focus_m)
      if (!(d > S(0))) throw std::invalid_argument("FocalStack: focus distance must be > 0");
    for (size_t i = 1; i < focus_m.size(); ++i)
      if (!(focus_m[i] > focus_m[i - 1]))
        throw std::invalid_argument("FocalStack: focus distances must be strictly increasing");
  }
};

}  // namespace dfs
