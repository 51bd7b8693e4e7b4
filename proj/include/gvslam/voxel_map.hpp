#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "gvslam/errors.hpp"
#include "gvslam/geometry.hpp"
#include "gvslam/image.hpp"
#include "gvslam/rgbd_frame.hpp"

namespace gvslam {

using Eigen::Vector4d;

/// Axis-aligned dense voxel grid geometry. Voxel (x, y, z) has its center at
/// origin + (index + 0.5) * voxel_size; the voxel size must be uniform
/// across axes.
struct GridSpec {
  Vec3d origin = Vec3d::Zero();   // world min corner, meters
  Vec3d extent = Vec3d::Zero();   // meters
  Eigen::Vector3i resolution = Eigen::Vector3i::Zero();

  double voxel_size() const { return extent.x() / resolution.x(); }
  int64_t num_voxels() const {
    return int64_t(resolution.x()) * resolution.y() * resolution.z();
  }
  /// x-fastest linear voxel index.
  int64_t linear_index(int x, int y, int z) const {
    return (int64_t(z) * resolution.y() + y) * resolution.x() + x;
  }
  Vec3d voxel_center(int x, int y, int z) const {
    return origin + Vec3d(x + 0.5, y + 0.5, z + 0.5) * voxel_size();
  }
  void validate() const;
};

/// Dense 4-channel scalar grid. Channel 0 holds occupancy (= -SDF),
/// channels 1-3 hold RGB. Storage is channel-planar, x fastest:
/// data[((c * nz + z) * ny + y) * nx + x].
template <typename S>
struct VoxelGrid4 {
  Eigen::Vector3i res = Eigen::Vector3i::Zero();
  std::vector<S> data;

  VoxelGrid4() = default;
  VoxelGrid4(const Eigen::Vector3i& r, S fill)
      : res(r), data(size_t(4) * r.x() * r.y() * r.z(), fill) {}

  int64_t voxels() const { return int64_t(res.x()) * res.y() * res.z(); }
  S* channel(int c) { return data.data() + int64_t(c) * voxels(); }
  const S* channel(int c) const { return data.data() + int64_t(c) * voxels(); }
  S& at(int c, int64_t voxel_index) { return channel(c)[voxel_index]; }
  const S& at(int c, int64_t voxel_index) const { return channel(c)[voxel_index]; }
};

/// Per-voxel Gaussian belief over (occupancy, RGB), factorised over voxels
/// and channels: a mean grid and a standard-deviation grid.
struct VoxelMapBelief {
  GridSpec spec;
  VoxelGrid4<double> mean;
  VoxelGrid4<double> stddev;

  static constexpr double kPriorOccupancy = -0.001;
  static constexpr double kPriorColor = 0.0;
  static constexpr double kPriorStddev = 1e3;

  /// Fresh belief at the uninformed prior.
  static VoxelMapBelief prior(const GridSpec& spec);
};

/// Per-voxel update inside the camera frustum truncation band: Gaussian
/// factors to be multiplied into the belief, precision form.
struct MapUpdate {
  std::vector<int64_t> indices;          // unique linear voxel indices
  std::vector<Vector4d> update_mean;     // per index
  std::vector<Vector4d> update_precision;  // per index, >= 0
};

struct UpdateParams {
  double truncation = 0.0;     // meters
  double sigma_update = 1.0;   // constant update scale
};

struct ApplyStats {
  int64_t updated_voxels = 0;
  double mean_stddev_updated = 0.0;   // over touched voxels, after update
  double max_stddev_increase = 0.0;   // > 0 would break monotone certainty
};

/// Trilinear interpolation of the 8 surrounding voxel centers. The sampling
/// domain is the grid inset by half a voxel (where all 8 neighbours exist);
/// boundary-inclusive. Throws OutOfBounds outside it.
Vector4d trilinear_sample(const VoxelGrid4<double>& grid, const GridSpec& spec,
                          const Vec3d& point);

/// Non-throwing single-channel variant for the renderer's march loop.
/// Returns false outside the sampling domain.
bool try_sample_channel(const VoxelGrid4<double>& grid, const GridSpec& spec,
                        const Vec3d& point, int channel, double& out);

/// Builds the projective-SDF update for one observation. Selects voxels whose
/// centers project onto a valid depth pixel with camera z in
/// (0, observed + truncation]. Occupancy update is -clamp(s) for
/// s = observed_depth - voxel_z (occupancy = -SDF: negative in free space,
/// positive behind the surface); color updates carry the observed RGB and get
/// nonzero precision only inside the |s| <= truncation band.
/// Throws EmptyUpdate when no voxel is selected.
MapUpdate compute_sdf_update(const RgbdFrame& frame, const Pose& pose,
                             const GridSpec& spec, const UpdateParams& params);

/// Multiplies the update factors into the belief: per channel, precisions add
/// and means combine precision-weighted. Zero-precision channels are left
/// bit-identical. Untouched voxels are never read or written.
ApplyStats apply_update(VoxelMapBelief& map, const MapUpdate& upd);

enum class Axis { X = 0, Y = 1, Z = 2 };

/// Extracts a constant-`axis` plane of the stddev grid for one channel.
/// Row/column layout: axis X -> (z, y), Y -> (z, x), Z -> (y, x).
Image<float> uncertainty_slice(const VoxelMapBelief& map, Axis axis, int index,
                               int channel);

/// Little-endian binary snapshot: header (magic "GVSM", version, spec) then
/// the mean grid and the stddev grid as 32-bit floats in storage order
/// (channel-planar, x fastest).
void save_map(const VoxelMapBelief& map, const std::string& path);
VoxelMapBelief load_map(const std::string& path);

}  // namespace gvslam
