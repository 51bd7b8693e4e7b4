#pragma once

#include <random>
#include <vector>

#include "gvslam/beliefs.hpp"
#include "gvslam/geometry.hpp"
#include "gvslam/renderer.hpp"
#include "gvslam/rgbd_frame.hpp"
#include "gvslam/state.hpp"

namespace gvslam {

struct TrackerParams {
  int steps = 1000;
  double lr_translation = 1e-3;
  double lr_rotation = 3.6e-4;
  int pixel_samples = 200;
  double geo_outlier = 0.45;    // meters, gated before 1/sigma scaling
  double photo_outlier = 0.15;  // mean |rgb| difference, gated before scaling
  double laplace_ema = 0.8;
  double damping = 1e-8;        // times trace(2 J^T J) / 6
  double sigma_geo = 0.02;      // residual scales, from the emission model
  double sigma_color = 0.1;
  double fd_step = 1e-6;        // Laplace finite-difference tangent step
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
};

/// Rendered prediction the current observation is aligned against, with
/// cached camera-frame unprojections and normals.
struct AnchorFrame {
  Pose pose;
  RgbdFrame frame;
  Image<Vec3f> points;  // camera frame
  NormalMap normals;    // camera frame
};

AnchorFrame make_anchor(const Pose& pose, RgbdFrame frame, double depth_jump);

/// Per-pixel point-to-plane and color residuals of the candidate pose against
/// the anchor, already scaled by 1 / sigma. A pixel is invalid when the warp
/// leaves the anchor image, the anchor data there is invalid, or either raw
/// residual exceeds its outlier threshold. Throws NoValidPixels when nothing
/// survives.
struct PixelResiduals {
  std::vector<double> geo;
  std::vector<Vec3d> photo;
  std::vector<uint8_t> valid;
};

PixelResiduals tracking_residuals(const Pose& candidate, const RgbdFrame& obs,
                                  const AnchorFrame& anchor,
                                  const std::vector<int>& pixels,
                                  const TrackerParams& params);

/// Gaussian log density of the pose residual in the tangent chart at
/// anchor_chart, and its gradient with respect to that chart's coordinates.
struct PriorEval {
  double logpdf = 0.0;
  Vec6d gradient = Vec6d::Zero();
};

PriorEval prior_logpdf(const Pose& candidate, const Gaussian& pose_prior,
                       const Pose& anchor_chart);

struct TrackingDiagnostics {
  double final_objective = 0.0;      // full-image scaled objective incl. prior
  double valid_pixel_fraction = 0.0;
  double mean_abs_geo = 0.0;         // meters, full image, no outlier gating
};

/// One evaluation of the MAP objective (scaled L1 pixel terms minus the prior
/// log density) over the given pixels, with its subgradient in the tangent
/// chart at `pose`. This is the optimizer's inner step, exposed so the
/// descent direction can be verified against finite differences.
struct ObjectiveEval {
  double value = 0.0;
  Vec6d gradient = Vec6d::Zero();
  int n_valid = 0;
};

ObjectiveEval tracking_objective(const Pose& pose, const RgbdFrame& obs,
                                 const AnchorFrame& anchor,
                                 const Gaussian& pose_prior, const Pose& prior_chart,
                                 const std::vector<int>& pixels,
                                 const TrackerParams& params);

/// MAP pose estimate: `steps` iterations of Adam with its momentum disabled
/// (first moment off, second-moment adaptation kept), a fresh uniform pixel
/// sample per step, separate translation / rotation step sizes, the update
/// composed onto the estimate in the tangent chart refreshed each step.
/// Throws TrackingLost when the full-image mean |geo| at the result exceeds
/// geo_outlier (or no pixel is usable at all).
Pose optimize_pose(const RgbdFrame& obs, const AnchorFrame& anchor,
                   const Gaussian& pose_prior, const Pose& prior_chart,
                   const Pose& init, const TrackerParams& params,
                   std::mt19937_64& rng, TrackingDiagnostics* diag = nullptr);

/// Laplace covariance (2 J^T J + damping I)^-1 at the MAP pose. J stacks the
/// central-finite-difference Jacobians of every valid full-image scaled
/// residual plus the whitened prior-residual rows.
Mat6d laplace_covariance(const Pose& pose_map, const RgbdFrame& obs,
                         const AnchorFrame& anchor, const Gaussian& pose_prior,
                         const Pose& prior_chart, const TrackerParams& params);

/// ema * previous + (1 - ema) * current; pass previous = nullptr on the
/// first call.
Mat6d smooth_covariance(const Mat6d& current, const Mat6d* previous, double ema);

/// Closes the state update: joins the pose belief (tangent chart at
/// chart_anchor) with the velocity conditional and re-anchors the result at
/// the fused mean pose.
StateBelief fuse_velocity(const Gaussian& pose_belief,
                          const LinearGaussianConditional& vel_given_pose,
                          const Pose& chart_anchor);

}  // namespace gvslam
