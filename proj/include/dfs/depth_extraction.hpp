#pragma once
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dfs/convolve.hpp"
#include "dfs/cost_volume.hpp"
#include "dfs/image.hpp"

namespace dfs {

struct DepthMap {
  int width = 0, height = 0;
  Plane<double> depth_m;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> valid;

  static DepthMap allocate(int width, int height) {
    DepthMap m;
    m.width = width;
    m.height = height;
    m.depth_m = Plane<double>::Zero(height, width);
    m.valid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(height, width, true);
    return m;
  }
};

enum class ReadoutMethod { hard_argmin, soft_argmin };

struct DepthEstimate {
  DepthMap map;
  Plane<double> confidence;  // [0,1]; diagnostic plumbing, not a calibrated probability
  ReadoutMethod method = ReadoutMethod::hard_argmin;
};

// Per-pixel index of the minimum-cost hypothesis (ties break to the lowest
// index). Exposed separately for tests and the invariance workflow.
inline Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic> argmin_indices(const CostVolume& vol) {
  if (vol.slices.empty()) throw std::invalid_argument("argmin_indices: empty volume");
  Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic> idx(vol.height, vol.width);
  for (int y = 0; y < vol.height; ++y)
    for (int x = 0; x < vol.width; ++x) {
      int best = 0;
      float bestv = vol.slices[0](y, x);
      for (int k = 1; k < vol.depth_count(); ++k)
        if (vol.slices[k](y, x) < bestv) {
          bestv = vol.slices[k](y, x);
          best = k;
        }
      idx(y, x) = best;
    }
  return idx;
}

// Hard argmin readout. Confidence is 1 − min/mean of the pixel's cost
// profile, clamped to [0,1]: a dip well below the profile mean reads as
// confident, and flat (sentinel) profiles score exactly 0.
inline DepthEstimate argmin_depth(const CostVolume& vol) {
  DepthEstimate est;
  est.method = ReadoutMethod::hard_argmin;
  est.map = DepthMap::allocate(vol.width, vol.height);
  est.confidence = Plane<double>::Zero(vol.height, vol.width);
  const int d = vol.depth_count();
  if (d == 0) throw std::invalid_argument("argmin_depth: empty volume");
  for (int y = 0; y < vol.height; ++y)
    for (int x = 0; x < vol.width; ++x) {
      int best = 0;
      double bestv = vol.slices[0](y, x), sum = bestv;
      for (int k = 1; k < d; ++k) {
        const double v = vol.slices[k](y, x);
        sum += v;
        if (v < bestv) {
          bestv = v;
          best = k;
        }
      }
      const double mean = sum / d;
      est.map.depth_m(y, x) = vol.hypotheses_m[size_t(best)];
      est.confidence(y, x) = mean > 0 ? std::clamp(1.0 - bestv / mean, 0.0, 1.0) : 0.0;
    }
  return est;
}

// Soft argmin readout: per pixel, softmax weights over -cost/temperature
// give a convex combination of hypothesis depths. Confidence is the largest
// weight. Computed with the log-sum-exp shift for stability.
inline DepthEstimate soft_argmin_depth(const CostVolume& vol, double temperature) {
  if (!(temperature > 0)) throw std::invalid_argument("soft_argmin_depth: temperature must be > 0");
  if (vol.slices.empty()) throw std::invalid_argument("soft_argmin_depth: empty volume");
  DepthEstimate est;
  est.method = ReadoutMethod::soft_argmin;
  est.map = DepthMap::allocate(vol.width, vol.height);
  est.confidence = Plane<double>::Zero(vol.height, vol.width);
  const int d = vol.depth_count();
  std::vector<double> logits(static_cast<size_t>(d), 0.0);
  for (int y = 0; y < vol.height; ++y)
    for (int x = 0; x < vol.width; ++x) {
      double top = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < d; ++k) {
        logits[size_t(k)] = -double(vol.slices[k](y, x)) / temperature;
        top = std::max(top, logits[size_t(k)]);
      }
      double z = 0, acc = 0, wmax = 0;
      for (int k = 0; k < d; ++k) {
        const double wk = std::exp(logits[size_t(k)] - top);
        z += wk;
        acc += wk * vol.hypotheses_m[size_t(k)];
        wmax = std::max(wmax, wk);
      }
      est.map.depth_m(y, x) = acc / z;
      est.confidence(y, x) = wmax / z;
    }
  return est;
}

// Fixed-weight spatial aggregation: Gaussian-smooth every slice. A
// deterministic, non-learned stand-in for trainable cost aggregation;
// useful for denoising the volume before readout.
inline CostVolume aggregate_volume(const CostVolume& vol, int radius, double sigma) {
  if (radius == 0) return vol;
  CostVolume out = vol;
  const Plane<float> k = gaussian_window<float>(radius, sigma);
  for (auto& s : out.slices) s = convolve2d(s, k, Boundary::replicate);
  return out;
}

}  // namespace dfs
