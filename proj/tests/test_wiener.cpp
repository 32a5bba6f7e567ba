#include <doctest.h>

#include <cmath>

#include "dfs/psf.hpp"
#include "dfs/scene.hpp"
#include "dfs/wiener.hpp"
#include "util.hpp"

using dfs::Boundary;
using dfs::Plane;

namespace {

// Texture whose spectrum stays inside the invertible band of the kernels
// used below; thresholds were pinned against a reference implementation.
Plane<double> texture_plane() { return dfs::standard_texture<double>(64, 64, 7)[0]; }

}  // namespace

TEST_SUITE("wiener") {

TEST_CASE("identity PSF returns the input") {
  const Plane<double> img = texture_plane();
  Plane<double> id(1, 1);
  id(0, 0) = 1.0;
  const Plane<double> out = dfs::wiener_deconvolve(img, id, 1e-3);
  CHECK(testutil::max_abs_diff(out, img) == 0.0);  // copy, then clamp is a no-op in [0,1]
}

TEST_CASE("periodic matched round trip restores the texture") {
  const Plane<double> img = texture_plane();
  for (double diam : {3.0, 5.0}) {
    const Plane<double> k = dfs::disk_psf(diam);
    const Plane<double> blurred = dfs::convolve2d(img, k, Boundary::wrap);
    const Plane<double> restored =
        dfs::wiener_deconvolve(blurred, k, 1e-3, /*margin=*/0, true, /*clamp=*/false);
    CHECK(testutil::psnr(restored, img) >= 55.0);  // reference run: ~90-99 dB
  }
}

TEST_CASE("reflect-padded round trip restores the texture") {
  const Plane<double> img = texture_plane();
  for (double diam : {3.0, 5.0}) {
    const Plane<double> k = dfs::disk_psf(diam);
    const Plane<double> blurred = dfs::convolve2d(img, k, Boundary::reflect);
    const Plane<double> restored = dfs::wiener_deconvolve(blurred, k, 1e-3);  // auto margin
    CHECK(testutil::psnr(restored, img) >= 35.0);  // reference run: ~52-62 dB
  }
}

TEST_CASE("a mismatched larger PSF leaves a visibly worse residual") {
  const Plane<double> img = texture_plane();
  const Plane<double> k_true = dfs::disk_psf(3.0);
  const Plane<double> k_big = dfs::disk_psf(6.0);
  const Plane<double> blurred = dfs::convolve2d(img, k_true, Boundary::wrap);
  const Plane<double> matched = dfs::wiener_deconvolve(blurred, k_true, 1e-3, 0, true, false);
  const Plane<double> wrong = dfs::wiener_deconvolve(blurred, k_big, 1e-3, 0, true, false);
  const double rm = std::sqrt((matched - img).square().mean());
  const double rw = std::sqrt((wrong - img).square().mean());
  CHECK(rw > 10.0 * rm);
}

TEST_CASE("laplacian power spectrum values") {
  const Plane<double> L2 = dfs::laplacian_power_spectrum<double>(8, 8);
  CHECK(L2(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
  // Nyquist in both axes: |(-4) + (-4)|^2 = 64
  CHECK(L2(4, 4) == doctest::Approx(64.0).epsilon(1e-12));
  CHECK(L2(0, 4) == doctest::Approx(16.0).epsilon(1e-12));
  CHECK(L2.minCoeff() >= 0.0);
  // symmetry in each axis
  CHECK(L2(1, 2) == doctest::Approx(L2(7, 6)).epsilon(1e-12));
}

TEST_CASE("taper eases the pad band toward the mean") {
  Plane<double> tile = Plane<double>::Zero(16, 16);
  tile(8, 8) = 1.0;  // mean 1/256
  const double mean = tile.mean();
  dfs::taper_to_mean(tile, 4);
  CHECK(tile(0, 0) == doctest::Approx(mean).epsilon(1e-12));  // outermost ring -> mean
  CHECK(tile(8, 8) == 1.0);                                   // interior untouched
  CHECK(std::abs(tile(0, 5) - mean) <= 1e-12);
}

TEST_CASE("clamping is applied only at the API boundary") {
  const Plane<double> img = texture_plane();
  const Plane<double> k = dfs::disk_psf(5.0);
  const Plane<double> blurred = dfs::convolve2d(img, k, Boundary::wrap);
  const Plane<double> clamped = dfs::wiener_deconvolve(blurred, k, 1e-6, 0);
  CHECK(clamped.minCoeff() >= 0.0);
  CHECK(clamped.maxCoeff() <= 1.0);
}

TEST_CASE("argument validation") {
  const Plane<double> img = texture_plane();
  const Plane<double> k = dfs::disk_psf(3.0);
  CHECK_THROWS_AS(dfs::wiener_deconvolve(img, k, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(dfs::wiener_deconvolve(img, k, -1.0), std::invalid_argument);
  const Plane<double> even = Plane<double>::Constant(2, 2, 0.25);
  CHECK_THROWS_AS(dfs::wiener_deconvolve(img, even, 1e-3), std::invalid_argument);
}

TEST_CASE("auto margin scales with the kernel and caps at the image") {
  CHECK(dfs::auto_margin(1, 256, 256) == 16);
  CHECK(dfs::auto_margin(3, 256, 256) == 24);
  CHECK(dfs::auto_margin(10, 256, 256) == 80);
  CHECK(dfs::auto_margin(10, 32, 256) == 32);
}

TEST_CASE("whole-image overload deconvolves each channel") {
  const dfs::Imaged img = dfs::standard_texture<double>(32, 32, 3);
  const Plane<double> k = dfs::disk_psf(3.0);
  dfs::Imaged blurred;
  for (const auto& p : img.planes)
    blurred.planes.push_back(dfs::convolve2d(p, k, Boundary::wrap));
  const dfs::Imaged restored = dfs::wiener_deconvolve(blurred, k, 1e-3, 0, true, false);
  REQUIRE(restored.channels() == 3);
  for (int c = 0; c < 3; ++c) CHECK(testutil::psnr(restored[c], img[c]) >= 50.0);
}

}  // TEST_SUITE
