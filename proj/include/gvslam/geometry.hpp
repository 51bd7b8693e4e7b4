#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cmath>

#include "gvslam/errors.hpp"

namespace gvslam {

template <typename S>
using Vec2 = Eigen::Matrix<S, 2, 1>;
template <typename S>
using Vec3 = Eigen::Matrix<S, 3, 1>;
template <typename S>
using Vec6 = Eigen::Matrix<S, 6, 1>;
template <typename S>
using Mat3 = Eigen::Matrix<S, 3, 3>;
template <typename S>
using Mat6 = Eigen::Matrix<S, 6, 6>;

using Vec2d = Vec2<double>;
using Vec3d = Vec3<double>;
using Vec6d = Vec6<double>;
using Mat3d = Mat3<double>;
using Mat6d = Mat6<double>;
using Vec3f = Vec3<float>;

/// Skew-symmetric matrix: skew(v) * u = v x u.
template <typename S>
Mat3<S> skew(const Vec3<S>& v) {
  Mat3<S> m;
  m << S(0), -v.z(), v.y(), v.z(), S(0), -v.x(), -v.y(), v.x(), S(0);
  return m;
}

/// Quaternion exponential: axis-angle vector -> unit quaternion.
template <typename S>
Eigen::Quaternion<S> quat_exp(const Vec3<S>& omega) {
  const S theta = omega.norm();
  S half_sinc;  // sin(theta/2)/theta
  if (theta < S(1e-8)) {
    half_sinc = S(0.5) - theta * theta / S(48);
  } else {
    half_sinc = std::sin(S(0.5) * theta) / theta;
  }
  Eigen::Quaternion<S> q;
  q.w() = std::cos(S(0.5) * theta);
  q.vec() = half_sinc * omega;
  q.normalize();
  return q;
}

/// Quaternion logarithm: unit quaternion -> axis-angle vector with angle in
/// [0, pi). Sign-invariant: q and -q map to the same vector.
/// Throws NearPiRotation within 1e-6 of the cut locus.
template <typename S>
Vec3<S> quat_log(const Eigen::Quaternion<S>& q_in) {
  Eigen::Quaternion<S> q = q_in;
  if (q.w() < S(0)) q.coeffs() = -q.coeffs();
  const S n = q.vec().norm();
  const S angle = S(2) * std::atan2(n, q.w());
  if (angle >= S(M_PI) - S(1e-6)) {
    throw NearPiRotation("quat_log: rotation angle within 1e-6 of pi");
  }
  if (n < S(1e-9)) {
    return (S(2) / q.w()) * q.vec();
  }
  return (angle / n) * q.vec();
}

/// Rigid transform world <- body: x_world = rotation * x_body + translation.
/// Quaternion is Hamilton convention, stored (w, x, y, z) via Eigen.
template <typename S>
struct PoseT {
  Vec3<S> translation = Vec3<S>::Zero();
  Eigen::Quaternion<S> rotation = Eigen::Quaternion<S>::Identity();

  PoseT() = default;
  PoseT(const Vec3<S>& t, const Eigen::Quaternion<S>& q)
      : translation(t), rotation(q.normalized()) {}

  static PoseT Identity() { return PoseT(); }

  Mat3<S> rotation_matrix() const { return rotation.toRotationMatrix(); }
};

using Pose = PoseT<double>;

/// World-frame linear (m/s) and angular (rad/s) velocity.
struct Twist {
  Vec3d linear = Vec3d::Zero();
  Vec3d angular = Vec3d::Zero();

  Vec6d vector() const {
    Vec6d v;
    v << linear, angular;
    return v;
  }
  static Twist from_vector(const Vec6d& v) {
    return Twist{v.head<3>(), v.tail<3>()};
  }
};

/// World-frame linear (m/s^2) and angular (rad/s^2) acceleration input.
struct Control {
  Vec3d linear_accel = Vec3d::Zero();
  Vec3d angular_accel = Vec3d::Zero();

  Vec6d vector() const {
    Vec6d v;
    v << linear_accel, angular_accel;
    return v;
  }
  static Control from_vector(const Vec6d& v) {
    return Control{v.head<3>(), v.tail<3>()};
  }
};

/// Pinhole camera: x right, y down, z forward; pixel (u, v) = (column, row)
/// with integer coordinates at pixel centers.
struct CameraIntrinsics {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;
  double max_depth = 0;  // meters

  void validate() const {
    if (!(fx > 0) || !(fy > 0)) throw InvalidConfig("intrinsics: fx, fy must be > 0");
    if (!(max_depth > 0)) throw InvalidConfig("intrinsics: max_depth must be > 0");
    if (width <= 0 || height <= 0) throw InvalidConfig("intrinsics: empty image");
    if (!(cx >= 0 && cx < width) || !(cy >= 0 && cy < height))
      throw InvalidConfig("intrinsics: principal point outside image");
  }
};

template <typename S>
PoseT<S> compose(const PoseT<S>& a, const PoseT<S>& b) {
  return PoseT<S>(a.translation + a.rotation * b.translation,
                  a.rotation * b.rotation);
}

template <typename S>
PoseT<S> inverse(const PoseT<S>& p) {
  const Eigen::Quaternion<S> qi = p.rotation.conjugate();
  return PoseT<S>(-(qi * p.translation), qi);
}

template <typename S, typename Derived>
Vec3<S> transform_point(const PoseT<S>& p, const Eigen::MatrixBase<Derived>& x) {
  return p.rotation * x.derived() + p.translation;
}

inline Vec2d project(const CameraIntrinsics& k, const Vec3d& p_cam) {
  if (!(p_cam.z() > 0)) {
    throw NonPositiveDepth("project: point depth must be positive");
  }
  return {k.fx * p_cam.x() / p_cam.z() + k.cx,
          k.fy * p_cam.y() / p_cam.z() + k.cy};
}

inline Vec3d unproject(const CameraIntrinsics& k, const Vec2d& pixel,
                       double depth) {
  if (!(depth > 0)) {
    throw NonPositiveDepth("unproject: depth must be positive");
  }
  return {(pixel.x() - k.cx) / k.fx * depth, (pixel.y() - k.cy) / k.fy * depth,
          depth};
}

// ---------------------------------------------------------------------------
// Tangent parameterization.
//
// A pose tangent is a 6-vector (translation offset, rotation axis-angle),
// both expressed in the world frame: the chart at anchor A is
//   P(delta) = (A.t + delta_t,  quat_exp(delta_w) * A.q).
// Rotation increments compose on the left, matching the world-frame angular
// velocities of the transition model. pose_exp/pose_log are the chart at
// identity.
// ---------------------------------------------------------------------------

inline Pose pose_exp(const Vec6d& tangent) {
  return Pose(tangent.head<3>(), quat_exp<double>(tangent.tail<3>()));
}

inline Vec6d pose_log(const Pose& p) {
  const Vec3d rot = quat_log(p.rotation);
  Vec6d v;
  v << p.translation, rot;
  return v;
}

inline Pose pose_boxplus(const Pose& anchor, const Vec6d& delta) {
  return Pose(anchor.translation + delta.head<3>(),
              quat_exp<double>(delta.tail<3>()) * anchor.rotation);
}

inline Vec6d pose_boxminus(const Pose& p, const Pose& anchor) {
  const Vec3d rot = quat_log<double>(p.rotation * anchor.rotation.conjugate());
  Vec6d v;
  v << p.translation - anchor.translation, rot;
  return v;
}

/// Geodesic rotation distance in radians, sign-invariant.
inline double rotation_distance(const Pose& a, const Pose& b) {
  const Eigen::Quaterniond r = a.rotation * b.rotation.conjugate();
  return 2.0 * std::atan2(r.vec().norm(), std::abs(r.w()));
}

}  // namespace gvslam
