#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dfs/depth_extraction.hpp"
#include "dfs/image.hpp"

namespace dfs {

// Depth-map error metrics over the intersection of validity masks.
// AbsRel additionally skips pixels whose true depth is below 1e-6 m (the
// ratio is meaningless there); the skipped count is reported.
struct MetricReport {
  double mae = 0, rmse = 0, abs_rel = 0;
  std::int64_t pixel_count = 0;          // jointly valid pixels
  std::int64_t abs_rel_skipped = 0;      // valid pixels with truth < 1e-6 m
  std::optional<double> rescale_factor;  // set when evaluated with rescaling
};

// Median of truth/prediction ratios over jointly valid pixels — the factor
// that multiplies the prediction to compensate the scale ambiguity. Even
// pixel counts take the lower median, which keeps the factor an exact
// element of the ratio set (and the rescaled metrics exactly invariant to
// global prediction scaling).
inline double median_ratio_scale(const DepthMap& pred, const DepthMap& truth) {
  if (pred.width != truth.width || pred.height != truth.height)
    throw std::invalid_argument("metrics: map shape mismatch");
  std::vector<double> ratios;
  ratios.reserve(size_t(pred.width) * size_t(pred.height));
  for (int y = 0; y < pred.height; ++y)
    for (int x = 0; x < pred.width; ++x) {
      if (!pred.valid(y, x) || !truth.valid(y, x)) continue;
      const double p = pred.depth_m(y, x);
      if (!(p > 0)) throw std::invalid_argument("metrics: nonpositive prediction in rescaling");
      ratios.push_back(truth.depth_m(y, x) / p);
    }
  if (ratios.empty()) throw std::invalid_argument("metrics: no jointly valid pixels");
  const size_t lower_mid = (ratios.size() - 1) / 2;
  std::nth_element(ratios.begin(), ratios.begin() + long(lower_mid), ratios.end());
  return ratios[lower_mid];
}

inline MetricReport evaluate(const DepthMap& pred, const DepthMap& truth, bool rescale = false) {
  if (pred.width != truth.width || pred.height != truth.height)
    throw std::invalid_argument("metrics: map shape mismatch");
  MetricReport r;
  double scale = 1.0;
  if (rescale) {
    scale = median_ratio_scale(pred, truth);
    r.rescale_factor = scale;
  }
  double se = 0, ae = 0, rel = 0;
  std::int64_t rel_used = 0;
  for (int y = 0; y < pred.height; ++y)
    for (int x = 0; x < pred.width; ++x) {
      if (!pred.valid(y, x) || !truth.valid(y, x)) continue;
      const double p = scale * pred.depth_m(y, x), t = truth.depth_m(y, x);
      ++r.pixel_count;
      const double e = p - t;
      se += e * e;
      ae += std::abs(e);
      if (t < 1e-6) {
        ++r.abs_rel_skipped;
      } else {
        ++rel_used;
        rel += std::abs(e) / t;
      }
    }
  if (r.pixel_count == 0) throw std::invalid_argument("metrics: no jointly valid pixels");
  r.rmse = std::sqrt(se / double(r.pixel_count));
  r.mae = ae / double(r.pixel_count);
  if (rel_used > 0) r.abs_rel = rel / double(rel_used);
  return r;
}

}  // namespace dfs
