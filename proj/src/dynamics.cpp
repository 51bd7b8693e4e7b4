#include "gvslam/dynamics.hpp"

#include <cmath>

namespace gvslam {

Twist integrate_velocity(const Twist& v, const Control& u,
                         const TransitionParams& params) {
  const double scale = std::pow(params.dt, params.accel_dt_power);
  return Twist{v.linear + u.linear_accel * scale,
               v.angular + u.angular_accel * scale};
}

Pose integrate_pose(const Pose& p, const Twist& v_next,
                    const TransitionParams& params) {
  return Pose(p.translation + v_next.linear * params.dt,
              quat_exp<double>(v_next.angular * params.dt) * p.rotation);
}

TransitionLinearization linearize_pose_integration(const Pose& p0, const Twist& v0,
                                                   const TransitionParams& params) {
  const Pose predicted = integrate_pose(p0, v0, params);
  const double h = 1e-5;
  TransitionLinearization lin;
  const Vec6d v0_vec = v0.vector();
  for (int j = 0; j < 6; ++j) {
    Vec6d delta = Vec6d::Zero();
    delta[j] = h;
    const Vec6d plus = pose_boxminus(
        integrate_pose(pose_boxplus(p0, delta), v0, params), predicted);
    delta[j] = -h;
    const Vec6d minus = pose_boxminus(
        integrate_pose(pose_boxplus(p0, delta), v0, params), predicted);
    lin.A.col(j) = (plus - minus) / (2.0 * h);

    Vec6d dv = v0_vec;
    dv[j] += h;
    const Vec6d vplus =
        pose_boxminus(integrate_pose(p0, Twist::from_vector(dv), params), predicted);
    dv[j] -= 2.0 * h;
    const Vec6d vminus =
        pose_boxminus(integrate_pose(p0, Twist::from_vector(dv), params), predicted);
    lin.B.col(j) = (vplus - vminus) / (2.0 * h);
  }
  lin.c = -lin.B * v0_vec;  // exact at the expansion point
  return lin;
}

PropagatedBelief propagate_belief(const StateBelief& prev, const Control& u,
                                  const TransitionParams& params) {
  const Twist v_next = integrate_velocity(prev.mean_velocity, u, params);
  const TransitionLinearization lin =
      linearize_pose_integration(prev.mean_pose, v_next, params);

  PropagatedBelief out;
  out.chart_anchor = integrate_pose(prev.mean_pose, v_next, params);

  Gaussian state;
  state.mean = VectorXd::Zero(12);
  state.mean.tail<6>() = prev.mean_velocity.vector();
  state.covariance = prev.covariance;

  // Acceleration integration: identity on the pose tangent, shift + noise on
  // the velocity.
  const double scale = std::pow(params.dt, params.accel_dt_power);
  MatrixXd F1 = MatrixXd::Identity(12, 12);
  VectorXd b1 = VectorXd::Zero(12);
  b1.tail<6>() = u.vector() * scale;
  MatrixXd Q1 = MatrixXd::Zero(12, 12);
  Q1.diagonal().tail<6>() = params.sigma_vel.array().square();
  state = propagate_linear(state, F1, b1, Q1);

  // Linearized pose integration consuming the *new* velocity.
  MatrixXd F2 = MatrixXd::Zero(12, 12);
  F2.topLeftCorner<6, 6>() = lin.A;
  F2.topRightCorner<6, 6>() = lin.B;
  F2.bottomRightCorner<6, 6>() = Mat6d::Identity();
  VectorXd b2 = VectorXd::Zero(12);
  b2.head<6>() = lin.c;
  MatrixXd Q2 = MatrixXd::Zero(12, 12);
  Q2.diagonal().head<6>() = params.sigma_pose.array().square();
  out.state_prior = propagate_linear(state, F2, b2, Q2);

  try {
    split_joint(out.state_prior, 6, out.pose_prior, out.vel_given_pose);
  } catch (const SingularHeadBlock&) {
    // Deterministic pose limit: velocity is independent of the pose.
    out.pose_prior.mean = out.state_prior.mean.head<6>();
    out.pose_prior.covariance = out.state_prior.covariance.topLeftCorner<6, 6>();
    out.vel_given_pose.gain = MatrixXd::Zero(6, 6);
    out.vel_given_pose.offset = out.state_prior.mean.tail<6>();
    out.vel_given_pose.noise_covariance =
        out.state_prior.covariance.bottomRightCorner<6, 6>();
  }
  return out;
}

}  // namespace gvslam
