#include "gvslam/worlds.hpp"

#include <cmath>
#include <random>

#include "gvslam/errors.hpp"
#include "gvslam/parallel.hpp"

namespace gvslam {

namespace {

double primitive_sdf(const ScenePrimitive& prim, const Vec3d& p) {
  const Vec3d q = p - prim.center;
  if (prim.kind == ScenePrimitive::Kind::Sphere) {
    return q.norm() - prim.half_extents.x();
  }
  const Vec3d d = q.cwiseAbs() - prim.half_extents;
  const double outside = d.cwiseMax(0.0).norm();
  const double inside = std::min(d.maxCoeff(), 0.0);
  return outside + inside;
}

}  // namespace

std::pair<double, Vec3f> scene_sdf(const SyntheticScene& scene, const Vec3d& point) {
  double best = std::numeric_limits<double>::infinity();
  Vec3f albedo = Vec3f::Zero();
  for (const auto& prim : scene.primitives) {
    const double d = primitive_sdf(prim, point);
    if (d < best) {
      best = d;
      albedo = prim.albedo;
    }
  }
  return {best, albedo};
}

Vec3f scene_albedo(const SyntheticScene& scene, const Vec3d& point) {
  Vec3f albedo = scene_sdf(scene, point).second;
  if (scene.checker_scale > 0) {
    const double s = scene.checker_scale;
    const int64_t parity = int64_t(std::floor(point.x() / s)) +
                           int64_t(std::floor(point.y() / s)) +
                           int64_t(std::floor(point.z() / s));
    if ((parity & 1) == 0) albedo *= 0.55f;
  }
  return albedo;
}

RgbdFrame render_ground_truth(const SyntheticScene& scene, const Pose& pose,
                              const CameraIntrinsics& k) {
  RgbdFrame out(k);
  const Mat3d R = pose.rotation_matrix();
  const Vec3d origin = pose.translation;
  constexpr double kTol = 1e-8;
  constexpr int kMaxIter = 20000;

  parallel_for(int64_t(k.height) * k.width, [&](int64_t begin, int64_t end) {
    for (int64_t i = begin; i < end; ++i) {
      const int r = int(i / k.width);
      const int c = int(i % k.width);
      Vec3d dir_cam((c - k.cx) / k.fx, (r - k.cy) / k.fy, 1.0);
      const double inv_norm = 1.0 / dir_cam.norm();
      const Vec3d dir = R * (dir_cam * inv_norm);
      const double s_max = k.max_depth / inv_norm;  // march until z > max_depth

      double s = 1e-6;
      for (int iter = 0; iter < kMaxIter && s <= s_max; ++iter) {
        const Vec3d point = origin + s * dir;
        const double d = scene_sdf(scene, point).first;
        if (d < 0 && iter == 0) break;  // camera inside a primitive
        if (d < kTol) {
          out.depth(r, c) = float(s * inv_norm);
          out.color(r, c) = scene_albedo(scene, point);
          out.valid(r, c) = 1;
          break;
        }
        s += d;
      }
    }
  }, 64);
  return out;
}

std::vector<SequenceItem> synthesize_sequence(const SyntheticScene& scene,
                                              const SequenceSpec& spec,
                                              uint64_t seed) {
  const size_t n = spec.trajectory.size();
  std::vector<SequenceItem> items(n);
  if (n == 0) return items;

  // Velocities that make the transition exact: the world-frame increments.
  std::vector<Twist> velocity(n);
  for (size_t t = 0; t + 1 < n; ++t) {
    const auto& [time0, p0] = spec.trajectory[t];
    const auto& [time1, p1] = spec.trajectory[t + 1];
    const double dt = time1 - time0;
    if (!(dt > 0)) {
      throw DegenerateTrajectory("synthesize_sequence: non-increasing timestamps");
    }
    velocity[t + 1].linear = (p1.translation - p0.translation) / dt;
    velocity[t + 1].angular =
        quat_log<double>(p1.rotation * p0.rotation.conjugate()) / dt;
  }
  velocity[0] = n > 1 ? velocity[1] : Twist{};

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  for (size_t t = 0; t < n; ++t) {
    SequenceItem& item = items[t];
    item.gt_pose = spec.trajectory[t].second;
    item.gt_velocity = velocity[t];
    if (t > 0) {
      const double dt = spec.trajectory[t].first - spec.trajectory[t - 1].first;
      const double scale = std::pow(dt, spec.accel_dt_power);
      item.has_control = true;
      item.control = Control::from_vector(
          (velocity[t].vector() - velocity[t - 1].vector()) / scale);
    }
    item.frame = render_ground_truth(scene, item.gt_pose, spec.camera);
    item.frame.timestamp = spec.trajectory[t].first;

    if (spec.depth_noise > 0 || spec.color_noise > 0) {
      for (int r = 0; r < item.frame.height(); ++r) {
        for (int c = 0; c < item.frame.width(); ++c) {
          if (!item.frame.valid(r, c)) continue;
          if (spec.depth_noise > 0) {
            const double d = item.frame.depth(r, c) + spec.depth_noise * noise(rng);
            if (d <= 0 || d > spec.camera.max_depth) {
              item.frame.valid(r, c) = 0;
              continue;
            }
            item.frame.depth(r, c) = float(d);
          }
          if (spec.color_noise > 0) {
            Vec3f& rgb = item.frame.color(r, c);
            for (int ch = 0; ch < 3; ++ch) {
              rgb[ch] = float(std::clamp(
                  double(rgb[ch]) + spec.color_noise * noise(rng), 0.0, 1.0));
            }
          }
        }
      }
    }
  }
  return items;
}

}  // namespace gvslam
