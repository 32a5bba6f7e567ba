#pragma once
#include <string>
#include <vector>

#include "dfs/camera.hpp"
#include "dfs/cost_volume.hpp"
#include "dfs/depth_extraction.hpp"
#include "dfs/image.hpp"

namespace dfs::io {

// ---- PFM (portable float map) ----
// "PF" = 3-channel, "Pf" = 1-channel; negative scale marks little-endian
// data; rows are stored bottom-up. Non-finite samples round-trip untouched.
Imaged read_pfm(const std::string& path);
void write_pfm(const std::string& path, const Imaged& img);

// Depth maps as single-channel PFM; non-finite samples become invalid.
DepthMap read_depth_pfm(const std::string& path);
void write_depth_pfm(const std::string& path, const DepthMap& map);  // invalid -> NaN

// ---- PNG ----
// Reads 8/16-bit gray/RGB (palette expanded, alpha dropped) into linear
// [0,1] via the gamma power curve; write re-applies the curve. bit_depth
// must be 8 or 16.
Imaged read_png(const std::string& path, double gamma = 2.2);
void write_png(const std::string& path, const Imaged& img, int bit_depth = 16,
               double gamma = 2.2);

// ---- cost volume container ----
// Little-endian: 64-byte header (magic "DFCV", version, W, H, D, flags,
// c_max, f1, reserved), then D float64 hypothesis depths, then D slices of
// W×H float32, row-major (y outer). flags bit0 = squashed, bit1 = normalized.
void write_volume(const std::string& path, const CostVolume& vol);
CostVolume read_volume(const std::string& path);

// ---- camera settings file ----
// Flat "key = value" text: focal_length, f_number, pixel_pitch_m and the
// comma-separated focus_distances list (meters); '#' starts a comment.
struct SettingsFile {
  double focal_length_m = 0, f_number = 0, pixel_pitch_m = 0;
  std::vector<double> focus_distances_m;

  CameraSettings<double> optics() const {
    return {focus_distances_m.empty() ? 1.0 : focus_distances_m.front(), focal_length_m,
            f_number, 1.0 / pixel_pitch_m};
  }
};

SettingsFile read_settings(const std::string& path);
void write_settings(const std::string& path, const SettingsFile& s);

}  // namespace dfs::io
