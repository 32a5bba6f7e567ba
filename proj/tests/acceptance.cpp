// Acceptance gate: one self-contained check per criterion, each printing a
// single PASS/FAIL line with its measured numbers and wall-clock budget.
// Run with no arguments for the full gate or with an index (1-10) for one
// criterion. The exit status is the number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "dfs/camera.hpp"
#include "dfs/cost_volume.hpp"
#include "dfs/depth_extraction.hpp"
#include "dfs/metrics.hpp"
#include "dfs/parallel.hpp"
#include "dfs/psf.hpp"
#include "dfs/render.hpp"
#include "dfs/scene.hpp"
#include "dfs/wiener.hpp"

namespace {

using Clock = std::chrono::steady_clock;
using dfs::Boundary;
using dfs::CameraSettings;
using dfs::CostParams;
using dfs::CostVolume;
using dfs::Plane;

std::string fmt(const char* f, ...) {
  char buf[768];
  va_list ap;
  va_start(ap, f);
  vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double urand(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * (double(g() >> 11) / 9007199254740992.0);
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Wall-clock budget bookkeeping shared by every criterion.
struct Budget {
  Clock::time_point t0 = Clock::now();
  double limit_s;
  explicit Budget(double limit) : limit_s(limit) {}
  double elapsed() const {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  }
  // appends the timing clause and folds the budget into the verdict
  void close(Outcome& o) const {
    const double el = elapsed();
    o.pass = o.pass && el < limit_s;
    o.detail += fmt(" (%.2f s, budget %.0f s)", el, limit_s);
  }
};

const CameraSettings<double> kDefocusNet{0.3, 2.9e-3, 1.0, 1.0 / 1.2e-5};
const CameraSettings<double> kNyu{2.0, 15e-3, 2.8, 1.0 / 5.6e-6};
const std::vector<double> kFocus{0.1, 0.15, 0.3, 0.7, 1.5};

CameraSettings<double> random_camera(std::mt19937_64& g) {
  const double f = urand(g, 2e-3, 40e-3);
  return {urand(g, 6.0 * f, 5.0), f, urand(g, 1.0, 16.0), urand(g, 2e4, 5e5)};
}

// Periodic single-plane stack: together with a margin-0 sweep this keeps
// render and deconvolution on the same boundary model, so the only error
// at the true hypothesis is the regularizer's.
dfs::FocalStack<double> make_stack(const dfs::Imaged& aif, double depth_m) {
  dfs::FocalStack<double> st;
  for (double df : kFocus) {
    CameraSettings<double> cam = kDefocusNet;
    cam.focus_distance_m = df;
    st.images.push_back(dfs::render_single_plane(aif, cam, depth_m, Boundary::wrap));
    st.focus_m.push_back(df);
  }
  return st;
}

CostParams sweep_params(double reg_weight = 1e-3) {
  CostParams p;
  p.reg_weight = reg_weight;
  p.margin = 0;
  return p;
}

struct Ref {
  double depth_m, coc_px;
};
// Frozen closed-form values (40-digit evaluation rounded once to double).
const Ref kDefocusNetRef[] = {
    {0.1, 4.7178278918433748},  {0.2, 1.1794569729608437}, {0.3, 0.0},
    {0.4, 0.58972848648042186}, {0.6, 1.1794569729608437}, {0.8, 1.4743212162010546},
    {1.0, 1.6512397621451812},  {1.5, 1.8871311567373499}, {2.0, 2.0050768540334343},
    {3.0, 2.1230225513295187},
};
const Ref kNyuRef[] = {
    {1.0, 7.2289621138127795}, {1.5, 2.4096540379375932}, {2.0, 0.0},
    {2.5, 1.4457924227625559}, {3.0, 2.4096540379375932}, {4.0, 3.6144810569063898},
    {5.0, 4.3373772682876677}, {6.0, 4.8193080758751863}, {8.0, 5.4217215853595846},
    {10.0, 5.7831696910502236},
};

// ---- criterion 1: closed-form circle of confusion --------------------------
Outcome criterion1() {
  const Budget budget(1.0);
  Outcome o;
  int ok = 0, total = 0;
  double worst = 0;
  auto check = [&](const CameraSettings<double>& cam, const Ref& r) {
    ++total;
    const double got = dfs::coc_diameter_px(cam, r.depth_m);
    const double rel = r.coc_px == 0.0 ? (got == 0.0 ? 0.0 : 1.0)
                                       : std::abs(got - r.coc_px) / r.coc_px;
    worst = std::max(worst, rel);
    if (rel <= 1e-12) ++ok;
  };
  for (const Ref& r : kDefocusNetRef) check(kDefocusNet, r);
  for (const Ref& r : kNyuRef) check(kNyu, r);
  o.pass = ok == total;
  o.detail = fmt("%d/%d tabulated coc diameters within 1e-12 relative (worst %.2e)", ok,
                 total, worst);
  budget.close(o);
  return o;
}

// ---- criterion 2: blur-preserving scaling, closed form and end to end ------
Outcome criterion2() {
  const Budget budget(120.0);
  Outcome o;
  std::mt19937_64 g(2024);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const CameraSettings<double> cam = random_camera(g);
    const double d = urand(g, cam.focus_distance_m / 4.0, 8.0);
    const double sigma = urand(g, 1.0, 9.0);
    const double base = dfs::coc_diameter_px(cam, d);
    const double scaled =
        dfs::coc_diameter_px(dfs::scale_sample(cam, sigma).settings, sigma * d);
    worst = std::max(worst, std::abs(scaled - base) / (base + 1e-30));
  }
  const bool closed_ok = worst <= 1e-9;

  const auto hyps = dfs::default_hypotheses();
  const double d_true = hyps[11];
  const dfs::Imaged aif = dfs::standard_texture<double>(64, 64, 7);
  const CostVolume vol =
      dfs::build_cost_volume(make_stack(aif, d_true), kDefocusNet, hyps, sweep_params());
  const auto est = dfs::argmin_depth(vol);

  const double sigma = 3.7;
  const CameraSettings<double> scaled_cam = dfs::scale_sample(kDefocusNet, sigma).settings;
  dfs::FocalStack<double> st2;
  for (double df : kFocus) {
    CameraSettings<double> cam = scaled_cam;
    cam.focus_distance_m = sigma * df;
    st2.images.push_back(
        dfs::render_single_plane(aif, cam, sigma * d_true, Boundary::wrap));
    st2.focus_m.push_back(sigma * df);
  }
  std::vector<double> hyps2(hyps);
  for (double& h : hyps2) h *= sigma;
  const CostVolume vol2 = dfs::build_cost_volume(st2, scaled_cam, hyps2, sweep_params());
  const auto est2 = dfs::argmin_depth(vol2);
  long long match = 0;
  const long long total = 64LL * 64LL;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      if (est2.map.depth_m(y, x) == sigma * est.map.depth_m(y, x)) ++match;

  o.pass = closed_ok && match == total;
  o.detail = fmt("coc identity worst relative error %.2e over 100 scaled triples; "
                 "scaled-pipeline argmin equals %.1fx original at %lld/%lld pixels",
                 worst, sigma, match, total);
  budget.close(o);
  return o;
}

// ---- criterion 3: affine inverse-depth decomposition -----------------------
Outcome criterion3() {
  const Budget budget(1.0);
  Outcome o;
  std::mt19937_64 g(7);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const CameraSettings<double> cam = random_camera(g);
    const auto [A, B] = dfs::coc_affine_coeffs(cam);
    for (int j = 0; j < 100; ++j) {
      const double d = urand(g, cam.focus_distance_m / 4.0, 8.0);
      worst = std::max(worst,
                       std::abs(std::abs(A + B / d) - dfs::coc_diameter_px(cam, d)));
    }
  }
  o.pass = worst <= 1e-9;
  o.detail = fmt("| |A + B/d| - coc | <= %.2e px over 100 settings x 100 depths", worst);
  budget.close(o);
  return o;
}

// ---- criterion 4: matched deconvolution round trip -------------------------
Outcome criterion4() {
  const Budget budget(5.0);
  Outcome o;
  const Plane<double> img = dfs::standard_texture<double>(64, 64, 7)[0];
  const Plane<double> k = dfs::disk_psf(5.0);
  const Plane<double> blurred = dfs::convolve2d(img, k, Boundary::wrap);
  const Plane<double> restored =
      dfs::wiener_deconvolve(blurred, k, 1e-3, /*margin=*/0, true, /*clamp=*/false);
  const double mse = (restored - img).square().mean();
  const double psnr = 10.0 * std::log10(1.0 / mse);
  o.pass = psnr >= 35.0;
  o.detail = fmt("matched restore of a 5 px disk blur: %.1f dB PSNR (need >= 35)", psnr);
  budget.close(o);
  return o;
}

// ---- criterion 5: render-then-sweep depth recovery -------------------------
Outcome criterion5() {
  const Budget budget(300.0);
  Outcome o;
  const auto hyps = dfs::default_hypotheses();
  const double bin_w = hyps[1] - hyps[0];
  const dfs::Imaged aif = dfs::standard_texture<double>(64, 64, 7);
  const Plane<double> lc = dfs::local_contrast(dfs::luminance(aif), 2);
  const int targets[] = {2, 11, 24, 37, 52};  // bin centers spanning 0.19-2.49 m
  double min_rate = 1.0, max_mae = 0.0;
  for (int k_true : targets) {
    const double d_true = hyps[size_t(k_true)];
    const CostVolume vol =
        dfs::build_cost_volume(make_stack(aif, d_true), kDefocusNet, hyps, sweep_params());
    const auto idx = dfs::argmin_indices(vol);
    long long hit = 0, masked = 0;
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x) {
        if (lc(y, x) < 0.02) continue;  // keep high-contrast pixels
        ++masked;
        if (idx(y, x) == k_true) ++hit;
      }
    min_rate = std::min(min_rate, double(hit) / double(masked));
    const auto soft = dfs::soft_argmin_depth(vol, 0.002);
    max_mae = std::max(max_mae, (soft.map.depth_m - d_true).abs().mean());
  }
  o.pass = min_rate >= 0.95 && max_mae <= bin_w;
  o.detail = fmt("5 planes in [0.19, 2.49] m: worst in-bin rate %.1f%% of high-contrast "
                 "pixels (need >= 95%%), worst soft-argmin MAE %.4f m (need <= %.4f)",
                 100.0 * min_rate, max_mae, bin_w);
  budget.close(o);
  return o;
}

// ---- criterion 6: outlier squash calibration -------------------------------
Outcome criterion6() {
  const Budget budget(1.0);
  Outcome o;
  const double a = dfs::squash_coefficient(0.3, 0.999);
  const bool a_ok = std::abs(a - 12.667337224167333) <= 1e-3;
  const bool zero_ok = std::tanh(a * 0.0) == 0.0;
  const double at_cmax = std::tanh(a * 0.3);
  const bool top_ok = std::abs(at_cmax - 0.999) <= 1e-3;
  o.pass = a_ok && zero_ok && top_ok;
  o.detail = fmt("tanh squash: a = %.6f (expect 12.667337), f(0) = 0, f(0.3) = %.6f", a,
                 at_cmax);
  budget.close(o);
  return o;
}

// ---- criterion 7: pooling window vs noise ----------------------------------
Outcome criterion7() {
  const Budget budget(120.0);
  Outcome o;
  const auto hyps = dfs::default_hypotheses();
  const int k_true = 11;
  const dfs::Imaged aif = dfs::standard_texture<double>(64, 64, 7);
  dfs::FocalStack<double> clean = make_stack(aif, hyps[size_t(k_true)]);
  dfs::FocalStack<double> noisy;
  noisy.focus_m = clean.focus_m;
  for (size_t i = 0; i < clean.images.size(); ++i)
    noisy.images.push_back(dfs::add_gaussian_noise(clean.images[i], 0.01, 900 + i));

  auto error_rate = [&](int radius) {
    CostParams p = sweep_params(0.03);  // smoothing weight matched to the noise floor
    p.window_radius = radius;
    const auto idx = dfs::argmin_indices(dfs::build_cost_volume(noisy, kDefocusNet, hyps, p));
    return double((idx != k_true).count()) / double(idx.size());
  };
  const double err5 = error_rate(2);
  const double err1 = error_rate(0);
  o.pass = err5 < err1;
  o.detail = fmt("argmin error on sigma=0.01 noise: 5x5 window %.3f vs 1x1 window %.3f",
                 err5, err1);
  budget.close(o);
  return o;
}

// ---- criterion 8: determinism and parallel speedup -------------------------
Outcome criterion8() {
  const Budget budget(300.0);
  Outcome o;
  const auto hyps = dfs::default_hypotheses();
  const dfs::Imaged aif = dfs::standard_texture<double>(256, 256, 7);
  const dfs::FocalStack<double> st = make_stack(aif, hyps[11]);
  CostParams p;  // default margin: the realistic padded configuration
  auto build = [&](int threads) {
    return dfs::build_cost_volume(st, kDefocusNet, hyps, p, threads);
  };
  const auto t1s = Clock::now();
  const CostVolume v1 = build(1);
  const double t1 = std::chrono::duration<double>(Clock::now() - t1s).count();
  const CostVolume v2 = build(2);
  const auto t4s = Clock::now();
  const CostVolume v4 = build(4);
  const double t4 = std::chrono::duration<double>(Clock::now() - t4s).count();
  const int hw = dfs::default_thread_budget();
  const CostVolume vm = build(hw);

  auto same = [&](const CostVolume& a, const CostVolume& b) {
    for (size_t k = 0; k < a.slices.size(); ++k)
      if (!(a.slices[k] == b.slices[k]).all()) return false;
    return true;
  };
  const bool bits_ok = same(v1, v2) && same(v1, v4) && same(v1, vm);
  const double speedup = t1 / t4;
  o.pass = bits_ok && speedup >= 2.0;
  o.detail = fmt("256x256 F=5 D=64 sweep: bitwise %s across {1,2,4,%d} threads; "
                 "single-thread %.2f s (reference figure 4.278 s); 4-thread speedup "
                 "%.2fx (need >= 2, %d hardware threads)",
                 bits_ok ? "identical" : "DIFFERENT", hw, t1, speedup, hw);
  budget.close(o);
  return o;
}

// ---- criterion 9: metric identities ----------------------------------------
Outcome criterion9() {
  const Budget budget(10.0);
  Outcome o;
  std::mt19937_64 g(5);
  auto rand_map = [&](int w, int h) {
    dfs::DepthMap m = dfs::DepthMap::allocate(w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) m.depth_m(y, x) = urand(g, 0.2, 8.0);
    return m;
  };
  bool order_ok = true;
  for (int i = 0; i < 100; ++i) {
    const auto t = rand_map(16, 12), pr = rand_map(16, 12);
    const auto r = dfs::evaluate(pr, t, false);
    order_ok = order_ok && r.rmse >= r.mae - 1e-15;
  }
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const auto t = rand_map(9, 7), pr = rand_map(9, 7);
    const auto base = dfs::evaluate(pr, t, true);
    for (double alpha : {2.0, 3.0}) {
      dfs::DepthMap ps = pr;
      ps.depth_m *= alpha;
      const auto r = dfs::evaluate(ps, t, true);
      worst = std::max({worst, std::abs(r.mae - base.mae), std::abs(r.rmse - base.rmse),
                        std::abs(r.abs_rel - base.abs_rel)});
    }
  }
  o.pass = order_ok && worst <= 1e-12;
  o.detail = fmt("rmse >= mae on 100 random pairs: %s; rescaled metrics drift under "
                 "global prediction scaling: %.2e (need <= 1e-12)",
                 order_ok ? "yes" : "NO", worst);
  budget.close(o);
  return o;
}

// ---- criterion 10: squash + normalize sharpen the cost profile -------------
Outcome criterion10() {
  const Budget budget(30.0);
  Outcome o;
  const auto hyps = dfs::default_hypotheses();
  const int k_true = 11;
  const dfs::Imaged aif = dfs::standard_texture<double>(64, 64, 7);
  CostParams p = sweep_params();
  p.squash = false;
  p.normalize = false;
  const CostVolume raw =
      dfs::build_cost_volume(make_stack(aif, hyps[size_t(k_true)]), kDefocusNet, hyps, p);
  CostVolume post = raw;
  post.c_max = p.c_max;
  post.f1 = p.f1;
  dfs::apply_squash(post);
  dfs::apply_normalize(post);

  // most textured pixel
  const Plane<double> lc = dfs::local_contrast(dfs::luminance(aif), 2);
  int by = 0, bx = 0;
  lc.maxCoeff(&by, &bx);
  // peak-to-mean prominence of the dip at the true bin
  auto prominence = [&](const CostVolume& vol) {
    double mn = vol.slices[0](by, bx), mx = mn, sum = 0;
    for (int k = 0; k < vol.depth_count(); ++k) {
      const double v = vol.slices[size_t(k)](by, bx);
      mn = std::min(mn, v);
      mx = std::max(mx, v);
      sum += v;
    }
    const double mean = sum / vol.depth_count();
    return (mx - double(vol.slices[size_t(k_true)](by, bx))) / (mx - mean);
  };
  const double before = prominence(raw), after = prominence(post);
  o.pass = after > before;
  o.detail = fmt("true-bin prominence at the most textured pixel: %.4f raw vs %.4f "
                 "after squash+normalize (must increase)",
                 before, after);
  budget.close(o);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  using Fn = Outcome (*)();
  const Fn criteria[10] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                           criterion6, criterion7, criterion8, criterion9, criterion10};
  int lo = 1, hi = 10;
  if (argc > 1) {
    const int n = std::atoi(argv[1]);
    if (n < 1 || n > 10) {
      std::fprintf(stderr, "usage: %s [criterion 1-10]\n", argv[0]);
      return 2;
    }
    lo = hi = n;
  }
  int failures = 0;
  for (int i = lo; i <= hi; ++i) {
    const Outcome o = criteria[i - 1]();
    std::printf("[%s] criterion %d: %s\n", o.pass ? "PASS" : "FAIL", i, o.detail.c_str());
    if (!o.pass) ++failures;
  }
  return failures;
}
