#include "gvslam/voxel_map.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "gvslam/parallel.hpp"

namespace gvslam {

void GridSpec::validate() const {
  if (!(extent.minCoeff() > 0)) throw InvalidConfig("GridSpec: extent must be positive");
  if (resolution.minCoeff() < 2) throw InvalidConfig("GridSpec: resolution must be >= 2 per axis");
  const double h = voxel_size();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(extent[a] / resolution[a] - h) > 1e-9) {
      throw InvalidConfig("GridSpec: voxel size must be uniform across axes");
    }
  }
}

VoxelMapBelief VoxelMapBelief::prior(const GridSpec& spec) {
  spec.validate();
  VoxelMapBelief map;
  map.spec = spec;
  map.mean = VoxelGrid4<double>(spec.resolution, kPriorColor);
  std::fill_n(map.mean.channel(0), map.mean.voxels(), kPriorOccupancy);
  map.stddev = VoxelGrid4<double>(spec.resolution, kPriorStddev);
  return map;
}

namespace {

struct TrilinearCell {
  int64_t base;      // linear index of the (x0, y0, z0) corner voxel
  int64_t sx, sy, sz;  // strides
  double fx, fy, fz;   // fractional offsets in [0, 1]
};

inline bool locate_cell(const GridSpec& spec, const Vec3d& point, TrilinearCell& cell) {
  const double h = spec.voxel_size();
  const Vec3d g = (point - spec.origin) / h - Vec3d::Constant(0.5);
  int idx[3];
  double frac[3];
  for (int a = 0; a < 3; ++a) {
    const double upper = spec.resolution[a] - 1;
    if (!(g[a] >= 0.0) || !(g[a] <= upper)) return false;
    int i0 = static_cast<int>(std::floor(g[a]));
    i0 = std::min(i0, spec.resolution[a] - 2);
    idx[a] = i0;
    frac[a] = g[a] - i0;
  }
  cell.base = spec.linear_index(idx[0], idx[1], idx[2]);
  cell.sx = 1;
  cell.sy = spec.resolution.x();
  cell.sz = int64_t(spec.resolution.x()) * spec.resolution.y();
  cell.fx = frac[0];
  cell.fy = frac[1];
  cell.fz = frac[2];
  return true;
}

inline double sample_cell(const double* chan, const TrilinearCell& c) {
  const double* p000 = chan + c.base;
  const double v00 = p000[0] + c.fx * (p000[c.sx] - p000[0]);
  const double* p010 = p000 + c.sy;
  const double v10 = p010[0] + c.fx * (p010[c.sx] - p010[0]);
  const double* p001 = p000 + c.sz;
  const double v01 = p001[0] + c.fx * (p001[c.sx] - p001[0]);
  const double* p011 = p001 + c.sy;
  const double v11 = p011[0] + c.fx * (p011[c.sx] - p011[0]);
  const double v0 = v00 + c.fy * (v10 - v00);
  const double v1 = v01 + c.fy * (v11 - v01);
  return v0 + c.fz * (v1 - v0);
}

}  // namespace

Vector4d trilinear_sample(const VoxelGrid4<double>& grid, const GridSpec& spec,
                          const Vec3d& point) {
  TrilinearCell cell;
  if (!locate_cell(spec, point, cell)) {
    throw OutOfBounds("trilinear_sample: point outside the sampling domain");
  }
  Vector4d out;
  for (int c = 0; c < 4; ++c) out[c] = sample_cell(grid.channel(c), cell);
  return out;
}

bool try_sample_channel(const VoxelGrid4<double>& grid, const GridSpec& spec,
                        const Vec3d& point, int channel, double& out) {
  TrilinearCell cell;
  if (!locate_cell(spec, point, cell)) return false;
  out = sample_cell(grid.channel(channel), cell);
  return true;
}

MapUpdate compute_sdf_update(const RgbdFrame& frame, const Pose& pose,
                             const GridSpec& spec, const UpdateParams& params) {
  spec.validate();
  const CameraIntrinsics& k = frame.intrinsics;
  const double h = spec.voxel_size();
  const double trunc = params.truncation;
  const double inv_var = 1.0 / (params.sigma_update * params.sigma_update);

  // World AABB of the update region: camera center plus the image corners
  // pushed to max_depth + truncation, padded one voxel.
  const double z_far = k.max_depth + trunc;
  Vec3d lo = pose.translation, hi = pose.translation;
  const double us[2] = {-0.5, k.width - 0.5};
  const double vs[2] = {-0.5, k.height - 0.5};
  for (double u : us) {
    for (double v : vs) {
      const Vec3d corner = transform_point(
          pose, Vec3d((u - k.cx) / k.fx * z_far, (v - k.cy) / k.fy * z_far, z_far));
      lo = lo.cwiseMin(corner);
      hi = hi.cwiseMax(corner);
    }
  }
  Eigen::Vector3i i0, i1;
  for (int a = 0; a < 3; ++a) {
    i0[a] = std::max(0, int(std::floor((lo[a] - spec.origin[a]) / h - 0.5)) - 1);
    i1[a] = std::min(spec.resolution[a] - 1,
                     int(std::ceil((hi[a] - spec.origin[a]) / h - 0.5)) + 1);
  }

  MapUpdate upd;
  if ((i1 - i0).minCoeff() < 0) {
    throw EmptyUpdate("compute_sdf_update: frustum does not intersect the grid");
  }

  const Pose cam_from_world = inverse(pose);
  const Mat3d R = cam_from_world.rotation_matrix();
  const Vec3d t = cam_from_world.translation;
  const Vec3d step_x = R.col(0) * h;

  struct PlaneBuffer {
    std::vector<int64_t> indices;
    std::vector<Vector4d> mean;
    std::vector<Vector4d> precision;
  };
  const int num_planes = i1.z() - i0.z() + 1;
  std::vector<PlaneBuffer> planes(num_planes);

  parallel_for_tasks(num_planes, [&](int64_t plane) {
    const int z = i0.z() + int(plane);
    PlaneBuffer& buf = planes[plane];
    for (int y = i0.y(); y <= i1.y(); ++y) {
      Vec3d p_cam = R * spec.voxel_center(i0.x(), y, z) + t;
      for (int x = i0.x(); x <= i1.x(); ++x, p_cam += step_x) {
        const double depth_cam = p_cam.z();
        if (depth_cam <= 0.0) continue;
        const int col = int(std::lround(k.fx * p_cam.x() / depth_cam + k.cx));
        const int row = int(std::lround(k.fy * p_cam.y() / depth_cam + k.cy));
        if (col < 0 || col >= k.width || row < 0 || row >= k.height) continue;
        if (!frame.valid(row, col)) continue;
        const double observed = frame.depth(row, col);
        if (depth_cam > observed + trunc) continue;
        const double s = observed - depth_cam;
        const double s_clamped = std::clamp(s, -trunc, trunc);

        Vector4d mean = Vector4d::Zero();
        Vector4d precision = Vector4d::Zero();
        mean[0] = -s_clamped;
        precision[0] = inv_var;
        if (std::abs(s) <= trunc) {
          const Vec3f& rgb = frame.color(row, col);
          mean[1] = rgb[0];
          mean[2] = rgb[1];
          mean[3] = rgb[2];
          precision[1] = precision[2] = precision[3] = inv_var;
        }
        buf.indices.push_back(spec.linear_index(x, y, z));
        buf.mean.push_back(mean);
        buf.precision.push_back(precision);
      }
    }
  });

  size_t total = 0;
  for (const auto& p : planes) total += p.indices.size();
  if (total == 0) {
    throw EmptyUpdate("compute_sdf_update: no voxel selected");
  }
  upd.indices.reserve(total);
  upd.update_mean.reserve(total);
  upd.update_precision.reserve(total);
  for (auto& p : planes) {
    upd.indices.insert(upd.indices.end(), p.indices.begin(), p.indices.end());
    upd.update_mean.insert(upd.update_mean.end(), p.mean.begin(), p.mean.end());
    upd.update_precision.insert(upd.update_precision.end(), p.precision.begin(),
                                p.precision.end());
  }
  return upd;
}

ApplyStats apply_update(VoxelMapBelief& map, const MapUpdate& upd) {
  const int64_t n = int64_t(upd.indices.size());
  if (upd.update_mean.size() != size_t(n) || upd.update_precision.size() != size_t(n)) {
    throw DimensionMismatch("apply_update: ragged update");
  }
  const int64_t nvox = map.spec.num_voxels();
  for (int64_t i = 0; i < n; ++i) {
    if (upd.indices[i] < 0 || upd.indices[i] >= nvox) {
      throw IndexOutOfRange("apply_update: voxel index out of range");
    }
  }

  const int64_t chunk = 8192;
  const int64_t num_chunks = (n + chunk - 1) / chunk;
  std::vector<double> chunk_stddev_sum(num_chunks, 0.0);
  std::vector<double> chunk_max_increase(num_chunks, 0.0);

  parallel_for_tasks(num_chunks, [&](int64_t ci) {
    const int64_t begin = ci * chunk;
    const int64_t end = std::min(n, begin + chunk);
    double sum = 0.0, max_inc = 0.0;
    for (int64_t i = begin; i < end; ++i) {
      const int64_t idx = upd.indices[i];
      for (int c = 0; c < 4; ++c) {
        const double lam_upd = upd.update_precision[i][c];
        if (!(lam_upd > 0.0)) continue;  // zero-precision channel: bit-identical
        double& sigma = map.stddev.at(c, idx);
        double& mu = map.mean.at(c, idx);
        const double lam_old = 1.0 / (sigma * sigma);
        const double lam_new = lam_old + lam_upd;
        mu = (lam_old * mu + lam_upd * upd.update_mean[i][c]) / lam_new;
        const double sigma_new = 1.0 / std::sqrt(lam_new);
        max_inc = std::max(max_inc, sigma_new - sigma);
        sigma = sigma_new;
      }
      sum += map.stddev.at(0, idx);
    }
    chunk_stddev_sum[ci] = sum;
    chunk_max_increase[ci] = max_inc;
  });

  ApplyStats stats;
  stats.updated_voxels = n;
  double sum = 0.0;
  for (int64_t ci = 0; ci < num_chunks; ++ci) {
    sum += chunk_stddev_sum[ci];
    stats.max_stddev_increase = std::max(stats.max_stddev_increase, chunk_max_increase[ci]);
  }
  stats.mean_stddev_updated = n > 0 ? sum / double(n) : 0.0;
  return stats;
}

Image<float> uncertainty_slice(const VoxelMapBelief& map, Axis axis, int index,
                               int channel) {
  const Eigen::Vector3i res = map.spec.resolution;
  if (channel < 0 || channel >= 4) throw IndexOutOfRange("uncertainty_slice: channel");
  const int a = int(axis);
  if (index < 0 || index >= res[a]) throw IndexOutOfRange("uncertainty_slice: index");

  auto value = [&](int x, int y, int z) {
    return float(map.stddev.at(channel, map.spec.linear_index(x, y, z)));
  };
  Image<float> out;
  switch (axis) {
    case Axis::X:
      out = Image<float>(res.z(), res.y());
      for (int z = 0; z < res.z(); ++z)
        for (int y = 0; y < res.y(); ++y) out(z, y) = value(index, y, z);
      break;
    case Axis::Y:
      out = Image<float>(res.z(), res.x());
      for (int z = 0; z < res.z(); ++z)
        for (int x = 0; x < res.x(); ++x) out(z, x) = value(x, index, z);
      break;
    case Axis::Z:
      out = Image<float>(res.y(), res.x());
      for (int y = 0; y < res.y(); ++y)
        for (int x = 0; x < res.x(); ++x) out(y, x) = value(x, y, index);
      break;
  }
  return out;
}

namespace {

constexpr char kMagic[4] = {'G', 'V', 'S', 'M'};
constexpr uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

void write_grid_f32(std::ostream& os, const VoxelGrid4<double>& grid) {
  constexpr size_t kSlab = 1 << 20;
  std::vector<float> slab(kSlab);
  const size_t total = grid.data.size();
  for (size_t off = 0; off < total; off += kSlab) {
    const size_t count = std::min(kSlab, total - off);
    for (size_t i = 0; i < count; ++i) slab[i] = float(grid.data[off + i]);
    os.write(reinterpret_cast<const char*>(slab.data()),
             std::streamsize(count * sizeof(float)));
  }
}

void read_grid_f32(std::istream& is, VoxelGrid4<double>& grid) {
  constexpr size_t kSlab = 1 << 20;
  std::vector<float> slab(kSlab);
  const size_t total = grid.data.size();
  for (size_t off = 0; off < total; off += kSlab) {
    const size_t count = std::min(kSlab, total - off);
    is.read(reinterpret_cast<char*>(slab.data()), std::streamsize(count * sizeof(float)));
    for (size_t i = 0; i < count; ++i) grid.data[off + i] = double(slab[i]);
  }
}

}  // namespace

void save_map(const VoxelMapBelief& map, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("save_map: cannot open " + path);
  os.write(kMagic, 4);
  write_pod(os, kVersion);
  for (int a = 0; a < 3; ++a) write_pod(os, map.spec.origin[a]);
  for (int a = 0; a < 3; ++a) write_pod(os, map.spec.extent[a]);
  for (int a = 0; a < 3; ++a) write_pod(os, int32_t(map.spec.resolution[a]));
  write_grid_f32(os, map.mean);
  write_grid_f32(os, map.stddev);
  if (!os) throw IoError("save_map: write failed for " + path);
}

VoxelMapBelief load_map(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("load_map: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw ParseError("load_map: bad magic in " + path);
  }
  uint32_t version = 0;
  read_pod(is, version);
  if (version != kVersion) throw ParseError("load_map: unsupported version");
  GridSpec spec;
  for (int a = 0; a < 3; ++a) read_pod(is, spec.origin[a]);
  for (int a = 0; a < 3; ++a) read_pod(is, spec.extent[a]);
  for (int a = 0; a < 3; ++a) {
    int32_t r = 0;
    read_pod(is, r);
    spec.resolution[a] = r;
  }
  spec.validate();
  VoxelMapBelief map;
  map.spec = spec;
  map.mean = VoxelGrid4<double>(spec.resolution, 0.0);
  map.stddev = VoxelGrid4<double>(spec.resolution, 0.0);
  read_grid_f32(is, map.mean);
  read_grid_f32(is, map.stddev);
  if (!is) throw ParseError("load_map: truncated payload in " + path);
  return map;
}

}  // namespace gvslam
