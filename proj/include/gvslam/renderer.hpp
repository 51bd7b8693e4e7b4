#pragma once

#include <optional>

#include "gvslam/geometry.hpp"
#include "gvslam/rgbd_frame.hpp"
#include "gvslam/voxel_map.hpp"

namespace gvslam {

struct RenderParams {
  double step_eps = 0.0;      // march step, meters along the ray
  double tau = 0.0;           // occupancy hit threshold
  double max_depth = 0.0;     // march budget, meters along the ray
  double sigma_color = 0.1;   // emission Laplace scales
  double sigma_geo = 0.02;
};

/// One unit-norm ray per pixel, all sharing the camera center as origin.
struct RayBundle {
  Vec3d origin;
  Image<Vec3d> directions;   // world frame, unit norm
  Image<double> dir_cam_z;   // camera-z component of the unit ray
};

RayBundle generate_rays(const Pose& pose, const CameraIntrinsics& k);

/// Marches occupancy at ray parameters {eps, 2*eps, ...} up to
/// min(max_depth, grid exit) and returns the alpha-interpolated parameter of
/// the first tau-crossing, or nullopt when occupancy never reaches tau.
/// If the first in-domain sample already exceeds tau the bracket is
/// degenerate and that parameter is returned as-is.
std::optional<double> raymarch_hit(const Vec3d& origin, const Vec3d& direction,
                                   const VoxelGrid4<double>& map_mean,
                                   const GridSpec& spec,
                                   const RenderParams& params);

/// Emission mean: raymarched depth (stored as camera z) plus trilinear RGB at
/// the hit point. Pixels without a hit are invalid.
RgbdFrame render_rgbd(const Pose& pose, const VoxelMapBelief& map,
                      const CameraIntrinsics& k, const RenderParams& params);

/// Laplace log-likelihood of the observation given the rendered mean, summed
/// over jointly-valid pixels: depth at scale sigma_geo, each color channel at
/// scale sigma_color.
double emission_loglik(const RgbdFrame& obs, const RgbdFrame& rendered,
                       const RenderParams& params);

/// Normals from a depth image by central differences on unprojected points,
/// oriented toward the camera. Pixels adjacent to invalid depth or to jumps
/// larger than depth_jump are invalidated.
struct NormalMap {
  Image<Vec3f> normals;      // camera frame
  Image<uint8_t> valid;
};

NormalMap compute_normals(const RgbdFrame& frame, double depth_jump);

}  // namespace gvslam
