#pragma once

#include "gvslam/beliefs.hpp"
#include "gvslam/geometry.hpp"
#include "gvslam/state.hpp"

namespace gvslam {

struct TransitionParams {
  double dt = 0.0;                 // seconds
  Vec6d sigma_vel = Vec6d::Zero();   // velocity-integration noise stddev
  Vec6d sigma_pose = Vec6d::Zero();  // pose-integration noise stddev
  // The transition integrates acceleration as v + u * dt^accel_dt_power.
  // The generative formula uses power 2; kept configurable.
  double accel_dt_power = 2.0;
};

/// First-order expansion of pose integration around a linearization point:
/// pose-tangent out = A * pose-tangent in + B * velocity + c. Input tangents
/// are anchored at the linearization pose, outputs at the integrated pose.
struct TransitionLinearization {
  Mat6d A = Mat6d::Identity();
  Mat6d B = Mat6d::Zero();
  Vec6d c = Vec6d::Zero();
};

/// v_{t+1} = v_t + u_t * dt^power.
Twist integrate_velocity(const Twist& v, const Control& u,
                         const TransitionParams& params);

/// Euler step with the already-integrated velocity: translation moves by
/// linear * dt, rotation picks up the world-frame increment
/// quat_exp(angular * dt) on the left.
Pose integrate_pose(const Pose& p, const Twist& v_next,
                    const TransitionParams& params);

/// Central finite differences (step 1e-5) of integrate_pose in the tangent
/// charts at (p0, v0); c makes the expansion exact at the expansion point.
TransitionLinearization linearize_pose_integration(const Pose& p0, const Twist& v0,
                                                   const TransitionParams& params);

struct PropagatedBelief {
  /// Predicted mean pose; every pose tangent below is anchored here.
  Pose chart_anchor;
  Gaussian state_prior;   // 12-dim (pose tangent, velocity)
  Gaussian pose_prior;    // 6-dim head marginal
  LinearGaussianConditional vel_given_pose;
};

/// Closed-form push of the previous state belief through the linearized
/// transition: velocity integration first (noise sigma_vel), then linearized
/// pose integration (noise sigma_pose), then a pose/velocity split. When the
/// propagated pose block is singular (deterministic limit) the velocity
/// conditional degenerates to the independent velocity marginal.
PropagatedBelief propagate_belief(const StateBelief& prev, const Control& u,
                                  const TransitionParams& params);

}  // namespace gvslam
