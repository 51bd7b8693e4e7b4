#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gvslam/geometry.hpp"
#include "gvslam/rgbd_frame.hpp"

namespace gvslam {

struct TumLoadConfig {
  CameraIntrinsics intrinsics;   // at the native sensor resolution
  int out_width = 160;
  int out_height = 120;
  double depth_scale = 5000.0;   // raw units per meter
  double association_window = 0.020;  // seconds
};

struct TumItem {
  RgbdFrame frame;
  std::optional<Pose> gt_pose;
};

/// Loads a TUM-RGBD directory (rgb.txt, depth.txt, optional groundtruth.txt):
/// nearest-timestamp association inside the window, depth decoded at
/// 1/depth_scale meters per unit, images box-downsampled to the configured
/// resolution (integer factor), zero-depth pixels invalid.
std::vector<TumItem> load_tum_rgbd(const std::string& directory,
                                   const TumLoadConfig& config);

}  // namespace gvslam
