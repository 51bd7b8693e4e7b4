#include "gvslam/tracker.hpp"

#include <cmath>

#include "gvslam/parallel.hpp"

namespace gvslam {

AnchorFrame make_anchor(const Pose& pose, RgbdFrame frame, double depth_jump) {
  AnchorFrame anchor;
  anchor.pose = pose;
  anchor.normals = compute_normals(frame, depth_jump);
  const CameraIntrinsics& k = frame.intrinsics;
  anchor.points = Image<Vec3f>(k.height, k.width, Vec3f::Zero());
  for (int r = 0; r < k.height; ++r) {
    for (int c = 0; c < k.width; ++c) {
      if (!frame.valid(r, c)) continue;
      const double d = frame.depth(r, c);
      anchor.points(r, c) =
          Vec3d((c - k.cx) / k.fx * d, (r - k.cy) / k.fy * d, d).cast<float>();
    }
  }
  anchor.frame = std::move(frame);
  return anchor;
}

namespace {

struct PixelEval {
  bool valid = false;
  double geo = 0.0;       // scaled
  Vec3d photo = Vec3d::Zero();  // scaled
  Vec6d geo_jac = Vec6d::Zero();
  Eigen::Matrix<double, 3, 6> photo_jac = Eigen::Matrix<double, 3, 6>::Zero();
};

/// Warps one observed pixel into the anchor frame and evaluates the scaled
/// residuals; optionally also the analytic Jacobian rows with the
/// correspondence held fixed (standard ICP treatment).
PixelEval evaluate_pixel(const Pose& candidate, const RgbdFrame& obs,
                         const AnchorFrame& anchor, int pixel,
                         const TrackerParams& params, bool with_jacobian,
                         const Mat3d& R_w, const Vec3d& t_w) {
  PixelEval out;
  const CameraIntrinsics& ko = obs.intrinsics;
  const int r = pixel / ko.width;
  const int c = pixel % ko.width;
  if (!obs.valid(r, c)) return out;

  const double d = obs.depth(r, c);
  const Vec3d p_obs((c - ko.cx) / ko.fx * d, (r - ko.cy) / ko.fy * d, d);
  const Vec3d u_world = candidate.rotation * p_obs;
  const Vec3d y = R_w * (u_world + candidate.translation) + t_w;
  if (y.z() <= 0.0) return out;

  const CameraIntrinsics& ka = anchor.frame.intrinsics;
  const double u = ka.fx * y.x() / y.z() + ka.cx;
  const double v = ka.fy * y.y() / y.z() + ka.cy;

  const int u0 = int(std::floor(u));
  const int v0 = int(std::floor(v));
  if (u0 < 0 || u0 + 1 >= ka.width || v0 < 0 || v0 + 1 >= ka.height) return out;
  // All four neighbours must carry valid depth and normals; subpixel
  // interpolation across invalid data or depth edges is meaningless.
  for (int dv = 0; dv < 2; ++dv) {
    for (int du = 0; du < 2; ++du) {
      if (!anchor.frame.valid(v0 + dv, u0 + du)) return out;
      if (!anchor.normals.valid(v0 + dv, u0 + du)) return out;
    }
  }
  const double fu = u - u0;
  const double fv = v - v0;
  auto bilerp3 = [&](const Image<Vec3f>& img) {
    const Vec3d x00 = img(v0, u0).cast<double>();
    const Vec3d x10 = img(v0, u0 + 1).cast<double>();
    const Vec3d x01 = img(v0 + 1, u0).cast<double>();
    const Vec3d x11 = img(v0 + 1, u0 + 1).cast<double>();
    return Vec3d((1 - fu) * (1 - fv) * x00 + fu * (1 - fv) * x10 +
                 (1 - fu) * fv * x01 + fu * fv * x11);
  };

  // Geometric term: subpixel anchor point and normal.
  Vec3d n_hat = bilerp3(anchor.normals.normals);
  const double n_norm = n_hat.norm();
  if (n_norm < 1e-9) return out;
  n_hat /= n_norm;
  const Vec3d p_hat = bilerp3(anchor.points);
  const double geo_raw = (p_hat - y).dot(n_hat);
  if (std::abs(geo_raw) > params.geo_outlier) return out;

  // Photometric term: bilinear anchor color.
  const Vec3d c00 = anchor.frame.color(v0, u0).cast<double>();
  const Vec3d c10 = anchor.frame.color(v0, u0 + 1).cast<double>();
  const Vec3d c01 = anchor.frame.color(v0 + 1, u0).cast<double>();
  const Vec3d c11 = anchor.frame.color(v0 + 1, u0 + 1).cast<double>();
  const Vec3d c_anchor = (1 - fu) * (1 - fv) * c00 + fu * (1 - fv) * c10 +
                         (1 - fu) * fv * c01 + fu * fv * c11;
  const Vec3d photo_raw = c_anchor - obs.color(r, c).cast<double>();
  if (photo_raw.cwiseAbs().mean() > params.photo_outlier) return out;

  out.valid = true;
  out.geo = geo_raw / params.sigma_geo;
  out.photo = photo_raw / params.sigma_color;

  if (with_jacobian) {
    // y(delta) = R_w exp(dw) u_world + R_w (t + dt) + t_w.
    Eigen::Matrix<double, 3, 6> y_jac;
    y_jac.leftCols<3>() = R_w;
    y_jac.rightCols<3>() = -R_w * skew(u_world);

    Eigen::Matrix<double, 2, 3> proj_jac;
    const double iz = 1.0 / y.z();
    proj_jac << ka.fx * iz, 0, -ka.fx * y.x() * iz * iz, 0, ka.fy * iz,
        -ka.fy * y.y() * iz * iz;
    const Eigen::Matrix<double, 2, 6> pix_jac = proj_jac * y_jac;

    // Bilinear gradients of the interpolated anchor fields.
    auto patch_grad = [&](const Image<Vec3f>& img) {
      const Vec3d x00 = img(v0, u0).cast<double>();
      const Vec3d x10 = img(v0, u0 + 1).cast<double>();
      const Vec3d x01 = img(v0 + 1, u0).cast<double>();
      const Vec3d x11 = img(v0 + 1, u0 + 1).cast<double>();
      Eigen::Matrix<double, 3, 2> g;
      g.col(0) = (1 - fv) * (x10 - x00) + fv * (x11 - x01);
      g.col(1) = (1 - fu) * (x01 - x00) + fu * (x11 - x10);
      return g;
    };

    // d geo = n . (dp_hat - dy) + (p_hat - y) . dn_hat, with the anchor
    // fields moving through the warped pixel.
    const Eigen::Matrix<double, 3, 6> p_hat_jac = patch_grad(anchor.points) * pix_jac;
    const Mat3d normalizer = (Mat3d::Identity() - n_hat * n_hat.transpose()) / n_norm;
    const Eigen::Matrix<double, 3, 6> n_hat_jac =
        normalizer * patch_grad(anchor.normals.normals) * pix_jac;
    out.geo_jac = (n_hat.transpose() * (p_hat_jac - y_jac) +
                   (p_hat - y).transpose() * n_hat_jac)
                      .transpose() /
                  params.sigma_geo;

    Eigen::Matrix<double, 3, 2> color_jac;
    color_jac.col(0) = (1 - fv) * (c10 - c00) + fv * (c11 - c01);
    color_jac.col(1) = (1 - fu) * (c01 - c00) + fu * (c11 - c10);
    out.photo_jac = color_jac * pix_jac / params.sigma_color;
  }
  return out;
}

struct WarpContext {
  Mat3d R_w;
  Vec3d t_w;
};

WarpContext warp_context(const AnchorFrame& anchor) {
  const Pose world_to_anchor = inverse(anchor.pose);
  return {world_to_anchor.rotation_matrix(), world_to_anchor.translation};
}

}  // namespace

PixelResiduals tracking_residuals(const Pose& candidate, const RgbdFrame& obs,
                                  const AnchorFrame& anchor,
                                  const std::vector<int>& pixels,
                                  const TrackerParams& params) {
  const WarpContext ctx = warp_context(anchor);
  PixelResiduals out;
  out.geo.resize(pixels.size(), 0.0);
  out.photo.resize(pixels.size(), Vec3d::Zero());
  out.valid.resize(pixels.size(), 0);
  int n_valid = 0;
  for (size_t i = 0; i < pixels.size(); ++i) {
    const PixelEval e = evaluate_pixel(candidate, obs, anchor, pixels[i], params,
                                       false, ctx.R_w, ctx.t_w);
    if (!e.valid) continue;
    out.geo[i] = e.geo;
    out.photo[i] = e.photo;
    out.valid[i] = 1;
    ++n_valid;
  }
  if (n_valid == 0) {
    throw NoValidPixels("tracking_residuals: no valid pixel in the sample");
  }
  return out;
}

PriorEval prior_logpdf(const Pose& candidate, const Gaussian& pose_prior,
                       const Pose& anchor_chart) {
  if (pose_prior.dim() != 6) {
    throw DimensionMismatch("prior_logpdf: prior must be 6-dimensional");
  }
  const Vec6d v = pose_boxminus(candidate, anchor_chart);
  auto llt = cholesky_with_jitter(pose_prior.covariance);
  const VectorXd r = v - pose_prior.mean;
  const VectorXd w = llt.matrixL().solve(r);
  double log_det = 0.0;
  for (int i = 0; i < 6; ++i) log_det += std::log(llt.matrixL()(i, i));
  PriorEval out;
  out.logpdf = -0.5 * w.squaredNorm() - log_det - 3.0 * std::log(2.0 * M_PI);
  out.gradient = -llt.solve(r);
  return out;
}

ObjectiveEval tracking_objective(const Pose& pose, const RgbdFrame& obs,
                                 const AnchorFrame& anchor,
                                 const Gaussian& pose_prior, const Pose& prior_chart,
                                 const std::vector<int>& pixels,
                                 const TrackerParams& params) {
  const WarpContext ctx = warp_context(anchor);
  ObjectiveEval out;
  for (int pixel : pixels) {
    const PixelEval e =
        evaluate_pixel(pose, obs, anchor, pixel, params, true, ctx.R_w, ctx.t_w);
    if (!e.valid) continue;
    ++out.n_valid;
    out.value += std::abs(e.geo) + e.photo.cwiseAbs().sum();
    const double gs = e.geo > 0 ? 1.0 : (e.geo < 0 ? -1.0 : 0.0);
    out.gradient += gs * e.geo_jac;
    for (int ch = 0; ch < 3; ++ch) {
      const double ps = e.photo[ch] > 0 ? 1.0 : (e.photo[ch] < 0 ? -1.0 : 0.0);
      out.gradient += ps * e.photo_jac.row(ch).transpose();
    }
  }
  // Prior term by central differences in the chart at the current pose; the
  // analytic prior gradient lives in the chart at prior_chart instead.
  const double h = 1e-7;
  out.value -= prior_logpdf(pose, pose_prior, prior_chart).logpdf;
  for (int j = 0; j < 6; ++j) {
    Vec6d d = Vec6d::Zero();
    d[j] = h;
    const double plus =
        -prior_logpdf(pose_boxplus(pose, d), pose_prior, prior_chart).logpdf;
    d[j] = -h;
    const double minus =
        -prior_logpdf(pose_boxplus(pose, d), pose_prior, prior_chart).logpdf;
    out.gradient[j] += (plus - minus) / (2.0 * h);
  }
  return out;
}

Pose optimize_pose(const RgbdFrame& obs, const AnchorFrame& anchor,
                   const Gaussian& pose_prior, const Pose& prior_chart,
                   const Pose& init, const TrackerParams& params,
                   std::mt19937_64& rng, TrackingDiagnostics* diag) {
  const WarpContext ctx = warp_context(anchor);
  const int n_pixels = obs.height() * obs.width();
  std::uniform_int_distribution<int> pick(0, n_pixels - 1);

  Pose pose = init;
  Vec6d second_moment = Vec6d::Zero();
  std::vector<int> sample(params.pixel_samples);

  for (int step = 1; step <= params.steps; ++step) {
    ObjectiveEval eval;
    bool have_sample = false;
    for (int attempt = 0; attempt < 100 && !have_sample; ++attempt) {
      for (int& s : sample) s = pick(rng);
      eval = tracking_objective(pose, obs, anchor, pose_prior, prior_chart,
                                sample, params);
      have_sample = eval.n_valid > 0;
    }
    if (!have_sample) {
      throw TrackingLost("optimize_pose: no valid pixels after resampling");
    }

    // Adam with momentum disabled: first moment = raw gradient, second moment
    // kept with bias correction.
    second_moment = params.adam_beta2 * second_moment +
                    (1.0 - params.adam_beta2) *
                        eval.gradient.cwiseProduct(eval.gradient);
    const double correction = 1.0 - std::pow(params.adam_beta2, double(step));
    const Vec6d denom =
        (second_moment / correction).cwiseSqrt().array() + params.adam_eps;
    Vec6d delta = -eval.gradient.cwiseQuotient(denom);
    delta.head<3>() *= params.lr_translation;
    delta.tail<3>() *= params.lr_rotation;
    pose = pose_boxplus(pose, delta);
  }

  // Full-image health check, validity-gated but not outlier-gated.
  double sum_abs_geo = 0.0;
  int n_geo = 0, n_valid = 0;
  TrackerParams ungated = params;
  ungated.geo_outlier = std::numeric_limits<double>::infinity();
  ungated.photo_outlier = std::numeric_limits<double>::infinity();
  double objective = 0.0;
  for (int pixel = 0; pixel < n_pixels; ++pixel) {
    const PixelEval e =
        evaluate_pixel(pose, obs, anchor, pixel, ungated, false, ctx.R_w, ctx.t_w);
    if (!e.valid) continue;
    ++n_geo;
    sum_abs_geo += std::abs(e.geo) * params.sigma_geo;
    const PixelEval gated =
        evaluate_pixel(pose, obs, anchor, pixel, params, false, ctx.R_w, ctx.t_w);
    if (gated.valid) {
      ++n_valid;
      objective += std::abs(gated.geo) + gated.photo.cwiseAbs().sum();
    }
  }
  const double mean_abs_geo = n_geo > 0 ? sum_abs_geo / n_geo : 0.0;
  if (diag) {
    diag->mean_abs_geo = mean_abs_geo;
    diag->valid_pixel_fraction = double(n_valid) / double(n_pixels);
    diag->final_objective =
        objective - prior_logpdf(pose, pose_prior, prior_chart).logpdf;
  }
  if (n_geo == 0) {
    throw TrackingLost("optimize_pose: no usable pixel in the full image");
  }
  if (mean_abs_geo > params.geo_outlier) {
    throw TrackingLost("optimize_pose: mean |geo| residual above threshold");
  }
  return pose;
}

Mat6d laplace_covariance(const Pose& pose_map, const RgbdFrame& obs,
                         const AnchorFrame& anchor, const Gaussian& pose_prior,
                         const Pose& prior_chart, const TrackerParams& params) {
  const WarpContext ctx = warp_context(anchor);
  const int n_pixels = obs.height() * obs.width();
  const double h = params.fd_step;

  // 13 evaluations: center plus +/- h along each tangent axis. A pixel
  // contributes rows only if it stays valid in all of them.
  struct Eval {
    std::vector<double> geo;
    std::vector<Vec3d> photo;
    std::vector<uint8_t> valid;
  };
  std::vector<Eval> evals(13);
  std::vector<Pose> poses(13, pose_map);
  for (int j = 0; j < 6; ++j) {
    Vec6d d = Vec6d::Zero();
    d[j] = h;
    poses[1 + 2 * j] = pose_boxplus(pose_map, d);
    d[j] = -h;
    poses[2 + 2 * j] = pose_boxplus(pose_map, d);
  }
  parallel_for_tasks(13, [&](int64_t e) {
    Eval& ev = evals[e];
    ev.geo.resize(n_pixels);
    ev.photo.resize(n_pixels);
    ev.valid.resize(n_pixels);
    for (int pixel = 0; pixel < n_pixels; ++pixel) {
      const PixelEval pe = evaluate_pixel(poses[e], obs, anchor, pixel, params,
                                          false, ctx.R_w, ctx.t_w);
      ev.valid[pixel] = pe.valid;
      ev.geo[pixel] = pe.geo;
      ev.photo[pixel] = pe.photo;
    }
  });

  std::vector<int> rows;
  rows.reserve(n_pixels);
  for (int pixel = 0; pixel < n_pixels; ++pixel) {
    bool ok = true;
    for (const Eval& ev : evals) ok = ok && ev.valid[pixel];
    if (ok) rows.push_back(pixel);
  }

  const Eigen::Index n_rows = Eigen::Index(rows.size()) * 4 + 6;
  MatrixXd J(n_rows, 6);
  for (size_t i = 0; i < rows.size(); ++i) {
    const int pixel = rows[i];
    for (int j = 0; j < 6; ++j) {
      const Eval& plus = evals[1 + 2 * j];
      const Eval& minus = evals[2 + 2 * j];
      J(Eigen::Index(i) * 4, j) = (plus.geo[pixel] - minus.geo[pixel]) / (2 * h);
      for (int ch = 0; ch < 3; ++ch) {
        J(Eigen::Index(i) * 4 + 1 + ch, j) =
            (plus.photo[pixel][ch] - minus.photo[pixel][ch]) / (2 * h);
      }
    }
  }

  // Whitened prior rows.
  auto llt = cholesky_with_jitter(pose_prior.covariance);
  auto whitened = [&](const Pose& p) -> Vec6d {
    const Vec6d r = pose_boxminus(p, prior_chart) - Vec6d(pose_prior.mean);
    return llt.matrixL().solve(r);
  };
  for (int j = 0; j < 6; ++j) {
    J.block<6, 1>(n_rows - 6, j) =
        (whitened(poses[1 + 2 * j]) - whitened(poses[2 + 2 * j])) / (2 * h);
  }

  Mat6d hessian = 2.0 * (J.transpose() * J);
  const double damping = params.damping * hessian.trace() / 6.0;
  hessian.diagonal().array() += damping;
  auto hllt = cholesky_with_jitter(hessian);
  const Mat6d cov = hllt.solve(Mat6d::Identity());
  return 0.5 * (cov + cov.transpose());
}

Mat6d smooth_covariance(const Mat6d& current, const Mat6d* previous, double ema) {
  if (previous == nullptr) return current;
  return ema * (*previous) + (1.0 - ema) * current;
}

StateBelief fuse_velocity(const Gaussian& pose_belief,
                          const LinearGaussianConditional& vel_given_pose,
                          const Pose& chart_anchor) {
  const Gaussian joint = recombine(pose_belief, vel_given_pose);
  StateBelief out;
  out.mean_pose = pose_boxplus(chart_anchor, joint.mean.head<6>());
  out.mean_velocity = Twist::from_vector(joint.mean.tail<6>());
  // Re-anchoring the tangent at the fused mean pose keeps the covariance to
  // first order.
  out.covariance = joint.covariance;
  return out;
}

}  // namespace gvslam
