#include "gvslam/renderer.hpp"

#include <cmath>

#include "gvslam/parallel.hpp"

namespace gvslam {

RayBundle generate_rays(const Pose& pose, const CameraIntrinsics& k) {
  RayBundle bundle;
  bundle.origin = pose.translation;
  bundle.directions = Image<Vec3d>(k.height, k.width);
  bundle.dir_cam_z = Image<double>(k.height, k.width);
  const Mat3d R = pose.rotation_matrix();
  for (int r = 0; r < k.height; ++r) {
    for (int c = 0; c < k.width; ++c) {
      const Vec3d dir_cam((c - k.cx) / k.fx, (r - k.cy) / k.fy, 1.0);
      const double inv_norm = 1.0 / dir_cam.norm();
      bundle.directions(r, c) = R * (dir_cam * inv_norm);
      bundle.dir_cam_z(r, c) = inv_norm;
    }
  }
  return bundle;
}

namespace {

/// Ray / sampling-domain intersection, slab method. The domain is the grid
/// inset by half a voxel. Returns false on a miss.
bool domain_range(const GridSpec& spec, const Vec3d& origin, const Vec3d& dir,
                  double& s_lo, double& s_hi) {
  const double h = spec.voxel_size();
  s_lo = 0.0;
  s_hi = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    const double lo = spec.origin[a] + 0.5 * h;
    const double hi = spec.origin[a] + spec.extent[a] - 0.5 * h;
    if (std::abs(dir[a]) < 1e-15) {
      if (origin[a] < lo || origin[a] > hi) return false;
      continue;
    }
    double t0 = (lo - origin[a]) / dir[a];
    double t1 = (hi - origin[a]) / dir[a];
    if (t0 > t1) std::swap(t0, t1);
    s_lo = std::max(s_lo, t0);
    s_hi = std::min(s_hi, t1);
  }
  return s_lo <= s_hi;
}

}  // namespace

std::optional<double> raymarch_hit(const Vec3d& origin, const Vec3d& direction,
                                   const VoxelGrid4<double>& map_mean,
                                   const GridSpec& spec,
                                   const RenderParams& params) {
  double s_lo, s_hi;
  if (!domain_range(spec, origin, direction, s_lo, s_hi)) return std::nullopt;
  s_hi = std::min(s_hi, params.max_depth);

  const double eps = params.step_eps;
  double prev_s = 0.0, prev_f = 0.0;
  bool have_prev = false;
  const int64_t k_first = std::max<int64_t>(1, int64_t(std::ceil((s_lo - 1e-12) / eps)));
  const int64_t k_last = int64_t(std::floor(s_hi / eps + 1e-12));
  for (int64_t k = k_first; k <= k_last; ++k) {
    const double s = double(k) * eps;
    double f;
    if (!try_sample_channel(map_mean, spec, origin + s * direction, 0, f)) {
      have_prev = false;
      continue;
    }
    if (f >= params.tau) {
      if (!have_prev) return s;  // camera inside a surface or domain edge
      const double alpha = (params.tau - prev_f) / (f - prev_f);
      return alpha * s + (1.0 - alpha) * prev_s;
    }
    prev_s = s;
    prev_f = f;
    have_prev = true;
  }
  return std::nullopt;
}

RgbdFrame render_rgbd(const Pose& pose, const VoxelMapBelief& map,
                      const CameraIntrinsics& k, const RenderParams& params) {
  RgbdFrame out(k);
  const RayBundle rays = generate_rays(pose, k);
  parallel_for(int64_t(k.height) * k.width, [&](int64_t begin, int64_t end) {
    for (int64_t i = begin; i < end; ++i) {
      const int r = int(i / k.width);
      const int c = int(i % k.width);
      const Vec3d& dir = rays.directions(r, c);
      const auto hit = raymarch_hit(rays.origin, dir, map.mean, map.spec, params);
      if (!hit) continue;
      const Vec3d point = rays.origin + *hit * dir;
      Vec3f rgb = Vec3f::Zero();
      for (int ch = 0; ch < 3; ++ch) {
        double v;
        if (try_sample_channel(map.mean, map.spec, point, ch + 1, v)) {
          rgb[ch] = float(std::clamp(v, 0.0, 1.0));
        }
      }
      out.depth(r, c) = float(*hit * rays.dir_cam_z(r, c));
      out.color(r, c) = rgb;
      out.valid(r, c) = 1;
    }
  }, 256);
  return out;
}

double emission_loglik(const RgbdFrame& obs, const RgbdFrame& rendered,
                       const RenderParams& params) {
  if (!obs.same_shape(rendered)) {
    throw ShapeMismatch("emission_loglik: frame shapes differ");
  }
  const double log_geo = std::log(2.0 * params.sigma_geo);
  const double log_color = std::log(2.0 * params.sigma_color);
  double loglik = 0.0;
  for (int r = 0; r < obs.height(); ++r) {
    for (int c = 0; c < obs.width(); ++c) {
      if (!obs.valid(r, c) || !rendered.valid(r, c)) continue;
      loglik -= std::abs(double(obs.depth(r, c)) - double(rendered.depth(r, c))) /
                    params.sigma_geo +
                log_geo;
      const Vec3f dc = obs.color(r, c) - rendered.color(r, c);
      for (int ch = 0; ch < 3; ++ch) {
        loglik -= std::abs(double(dc[ch])) / params.sigma_color + log_color;
      }
    }
  }
  return loglik;
}

NormalMap compute_normals(const RgbdFrame& frame, double depth_jump) {
  const CameraIntrinsics& k = frame.intrinsics;
  NormalMap out;
  out.normals = Image<Vec3f>(k.height, k.width, Vec3f::Zero());
  out.valid = Image<uint8_t>(k.height, k.width, 0);

  auto point_at = [&](int r, int c) {
    const double d = frame.depth(r, c);
    return Vec3d((c - k.cx) / k.fx * d, (r - k.cy) / k.fy * d, d);
  };

  for (int r = 1; r < k.height - 1; ++r) {
    for (int c = 1; c < k.width - 1; ++c) {
      if (!frame.valid(r, c) || !frame.valid(r, c - 1) || !frame.valid(r, c + 1) ||
          !frame.valid(r - 1, c) || !frame.valid(r + 1, c)) {
        continue;
      }
      const double d = frame.depth(r, c);
      if (std::abs(frame.depth(r, c - 1) - d) > depth_jump ||
          std::abs(frame.depth(r, c + 1) - d) > depth_jump ||
          std::abs(frame.depth(r - 1, c) - d) > depth_jump ||
          std::abs(frame.depth(r + 1, c) - d) > depth_jump) {
        continue;
      }
      const Vec3d du = point_at(r, c + 1) - point_at(r, c - 1);
      const Vec3d dv = point_at(r + 1, c) - point_at(r - 1, c);
      Vec3d n = du.cross(dv);
      const double norm = n.norm();
      if (norm < 1e-12) continue;
      n /= norm;
      if (n.dot(point_at(r, c)) > 0) n = -n;  // face the camera
      out.normals(r, c) = n.cast<float>();
      out.valid(r, c) = 1;
    }
  }
  return out;
}

}  // namespace gvslam
