#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gvslam/geometry.hpp"
#include "gvslam/rgbd_frame.hpp"

namespace gvslam {

/// Analytic primitive with an exact Euclidean SDF. Boxes are axis-aligned.
struct ScenePrimitive {
  enum class Kind { Box, Sphere };
  Kind kind = Kind::Sphere;
  Vec3d center = Vec3d::Zero();
  Vec3d half_extents = Vec3d::Zero();  // sphere uses x() as the radius
  Vec3f albedo = Vec3f::Constant(0.5f);
};

struct SyntheticScene {
  std::vector<ScenePrimitive> primitives;
  Vec3d bounds_min = Vec3d::Zero();
  Vec3d bounds_max = Vec3d::Zero();
  /// World-space checker tiling of the albedo (0 disables): odd cells keep
  /// the primitive albedo, even cells are darkened. Gives flat surfaces the
  /// photometric texture the direct color term needs.
  double checker_scale = 0.0;
};

/// Exact SDF of the primitive union (min over primitives) and the albedo of
/// the nearest primitive.
std::pair<double, Vec3f> scene_sdf(const SyntheticScene& scene, const Vec3d& point);

/// Albedo at a surface point, checker modulation applied.
Vec3f scene_albedo(const SyntheticScene& scene, const Vec3d& point);

/// Sphere-traced ground-truth observation; depth is camera z. Pixels whose
/// ray never reaches a surface within max_depth are invalid.
RgbdFrame render_ground_truth(const SyntheticScene& scene, const Pose& pose,
                              const CameraIntrinsics& k);

struct SequenceSpec {
  std::vector<std::pair<double, Pose>> trajectory;  // strictly increasing time
  CameraIntrinsics camera;
  double depth_noise = 0.0;  // stddev, meters
  double color_noise = 0.0;  // stddev, intensity
  double accel_dt_power = 2.0;  // must match the transition being tested
};

struct SequenceItem {
  RgbdFrame frame;
  bool has_control = false;
  Control control;  // drives the transition from the previous frame to this one
  Pose gt_pose;
  Twist gt_velocity;
};

/// Observations plus ground truth for every trajectory pose. Velocities are
/// the finite differences that make the transition exact; controls are
/// back-derived through v_{t+1} = v_t + u_t * dt^power, so replaying them
/// through the transition reproduces the trajectory bit-for-bit (zero noise).
/// The first velocity is set equal to the second (first control is zero).
std::vector<SequenceItem> synthesize_sequence(const SyntheticScene& scene,
                                              const SequenceSpec& spec,
                                              uint64_t seed);

}  // namespace gvslam
