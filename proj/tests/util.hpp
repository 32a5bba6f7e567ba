#pragma once
#include <cmath>
#include <cstdint>
#include <random>

#include "dfs/image.hpp"

namespace testutil {

// Portable uniform in [lo, hi): 53-bit draw from the raw engine so the
// stream does not depend on the standard library's distribution internals.
inline double urand(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * (double(g() >> 11) / 9007199254740992.0);
}

template <class S>
double max_abs_diff(const dfs::Plane<S>& a, const dfs::Plane<S>& b) {
  return double((a - b).abs().maxCoeff());
}

template <class S>
double max_abs_diff(const dfs::Image<S>& a, const dfs::Image<S>& b) {
  double m = 0;
  for (size_t c = 0; c < a.planes.size(); ++c)
    m = std::max(m, max_abs_diff(a.planes[c], b.planes[c]));
  return m;
}

// Peak signal-to-noise ratio against a unit full-scale reference.
inline double psnr(const dfs::Plane<double>& a, const dfs::Plane<double>& b) {
  const double mse = (a - b).square().mean();
  return 10.0 * std::log10(1.0 / mse);
}

}  // namespace testutil
