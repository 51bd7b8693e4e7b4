#pragma once

#include <Eigen/Core>

#include "gvslam/geometry.hpp"

namespace gvslam {

/// Gaussian belief over the 12-DoF state. The covariance lives on
/// (pose tangent at mean_pose, velocity); see geometry.hpp for the chart.
struct StateBelief {
  Pose mean_pose;
  Twist mean_velocity;
  Eigen::Matrix<double, 12, 12> covariance =
      Eigen::Matrix<double, 12, 12>::Zero();
};

}  // namespace gvslam
