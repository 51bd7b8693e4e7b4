#pragma once

#include "gvslam/geometry.hpp"
#include "gvslam/image.hpp"

namespace gvslam {

/// Registered depth + color observation. Depth stores camera-z in meters
/// (TUM convention); invalid pixels are excluded from every residual.
struct RgbdFrame {
  Image<float> depth;
  Image<Vec3f> color;
  Image<uint8_t> valid;
  CameraIntrinsics intrinsics;
  double timestamp = 0.0;

  RgbdFrame() = default;
  explicit RgbdFrame(const CameraIntrinsics& k, double ts = 0.0)
      : depth(k.height, k.width, 0.0f),
        color(k.height, k.width, Vec3f::Zero()),
        valid(k.height, k.width, 0),
        intrinsics(k),
        timestamp(ts) {}

  int height() const { return depth.height(); }
  int width() const { return depth.width(); }

  bool same_shape(const RgbdFrame& o) const {
    return depth.same_shape(o.height(), o.width());
  }
};

}  // namespace gvslam
