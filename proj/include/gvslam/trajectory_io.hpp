#pragma once

#include <string>
#include <vector>

#include "gvslam/evaluation.hpp"
#include "gvslam/pipeline.hpp"
#include "gvslam/state.hpp"

namespace gvslam {

/// TUM format: "timestamp tx ty tz qx qy qz qw", one line per frame.
void write_tum_trajectory(const std::string& path,
                          const std::vector<std::pair<double, StateBelief>>& trajectory);
std::vector<TimedPoseEntry> read_tum_trajectory(const std::string& path);

/// Covariance sidecar: per frame the timestamp, the 21 upper-triangle entries
/// of the 6x6 pose covariance (tangent chart at the mean pose, row-major),
/// then the 12-dim state mean (pose tangent at identity, velocity).
struct CovarianceRecord {
  double stamp = 0.0;
  Mat6d pose_covariance = Mat6d::Zero();
  Vec6d pose_tangent = Vec6d::Zero();
  Vec6d velocity = Vec6d::Zero();
};

void write_covariances_csv(const std::string& path,
                           const std::vector<std::pair<double, StateBelief>>& trajectory);
std::vector<CovarianceRecord> read_covariances_csv(const std::string& path);

/// Per-frame stage timings and diagnostics.
void write_timings_csv(const std::string& path, const std::vector<StepSummary>& steps);

}  // namespace gvslam
