#include "gvslam/pipeline.hpp"

#include <chrono>
#include <cmath>

namespace gvslam {

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

void FilterConfig::validate() const {
  grid.validate();
  if (render_period < 1) throw InvalidConfig("render_period must be >= 1");
  if (!(render.step_eps > 0)) throw InvalidConfig("render.step_eps must be > 0");
  if (!(render.max_depth > 0)) throw InvalidConfig("render.max_depth must be > 0");
  if (!(update.truncation > 0)) throw InvalidConfig("update.truncation must be > 0");
  if (!(update.sigma_update > 0)) throw InvalidConfig("update.sigma_update must be > 0");
  if (!(transition.dt > 0)) throw InvalidConfig("transition.dt must be > 0");
  if (tracker.steps < 1) throw InvalidConfig("tracker.steps must be >= 1");
  if (!(tracker.lr_translation > 0) || !(tracker.lr_rotation > 0))
    throw InvalidConfig("tracker learning rates must be > 0");
  if (tracker.pixel_samples < 1) throw InvalidConfig("tracker.pixel_samples must be >= 1");
  if (!(tracker.laplace_ema >= 0 && tracker.laplace_ema < 1))
    throw InvalidConfig("tracker.laplace_ema must be in [0, 1)");
}

void mask_depth_discontinuities(RgbdFrame& frame, double threshold) {
  const Image<uint8_t> valid = frame.valid;
  for (int r = 0; r < frame.height(); ++r) {
    for (int c = 0; c < frame.width(); ++c) {
      if (!valid(r, c)) continue;
      const double d = frame.depth(r, c);
      double lo = d, hi = d;
      const int nr[4] = {r - 1, r + 1, r, r};
      const int nc[4] = {c, c, c - 1, c + 1};
      for (int i = 0; i < 4; ++i) {
        if (!frame.depth.in_bounds(nr[i], nc[i]) || !valid(nr[i], nc[i])) continue;
        const double dn = frame.depth(nr[i], nc[i]);
        lo = std::min(lo, dn);
        hi = std::max(hi, dn);
      }
      if (hi - lo > threshold) frame.valid(r, c) = 0;
    }
  }
}

Filter::Filter(const FilterConfig& config)
    : config_(config),
      map_(VoxelMapBelief::prior(config.grid)),
      state_(config.initial_state),
      rng_(config.seed) {
  config_.validate();
}

StepResult Filter::step(const RgbdFrame& obs,
                        const std::optional<Control>& control) {
  obs.intrinsics.validate();
  StepResult result;
  result.timestamp = obs.timestamp;
  const double t_start = now_seconds();
  const double discontinuity = 2.0 * config_.update.truncation;

  if (frame_index_ == 0) {
    // The very first observation is fused at the given initial state, no
    // tracking involved.
    RgbdFrame masked = obs;
    mask_depth_discontinuities(masked, discontinuity);
    const double t0 = now_seconds();
    try {
      const MapUpdate upd =
          compute_sdf_update(masked, state_.mean_pose, config_.grid, config_.update);
      const ApplyStats stats = apply_update(map_, upd);
      result.map_digest = {stats.updated_voxels, stats.mean_stddev_updated,
                           stats.max_stddev_increase};
    } catch (const EmptyUpdate&) {
      // Frustum misses the grid; nothing to fuse.
    }
    result.timings.map_update = now_seconds() - t0;
    ++frame_index_;
    prev_timestamp_ = obs.timestamp;
    result.state = state_;
    result.timings.total = now_seconds() - t_start;
    return result;
  }

  TransitionParams transition = config_.transition;
  if (config_.use_frame_timestamps && obs.timestamp > prev_timestamp_) {
    transition.dt = obs.timestamp - prev_timestamp_;
  }

  // (1) Closed-form belief propagation through the linearized transition.
  double t0 = now_seconds();
  const PropagatedBelief prop =
      propagate_belief(state_, control.value_or(Control{}), transition);
  result.timings.propagate = now_seconds() - t0;

  // (2) Periodic anchor refresh, rendered at the previous mean pose.
  t0 = now_seconds();
  if (!anchor_ || (frame_index_ - 1) % config_.render_period == 0) {
    RgbdFrame rendered =
        render_rgbd(state_.mean_pose, map_, obs.intrinsics, config_.render);
    rendered.timestamp = prev_timestamp_;
    anchor_ = make_anchor(state_.mean_pose, std::move(rendered), discontinuity);
  }
  result.timings.render = now_seconds() - t0;

  RgbdFrame masked = obs;
  mask_depth_discontinuities(masked, discontinuity);

  bool lost = false;
  Pose pose_map;
  // (3) MAP pose optimization from the propagated prior mean.
  t0 = now_seconds();
  try {
    pose_map = optimize_pose(masked, *anchor_, prop.pose_prior, prop.chart_anchor,
                             prop.chart_anchor, config_.tracker, rng_,
                             &result.tracking);
  } catch (const TrackingLost&) {
    lost = true;
  }
  result.timings.track = now_seconds() - t0;

  if (lost) {
    // Coast on the propagated prior; the map is left untouched.
    result.tracking_lost = true;
    state_.mean_pose = prop.chart_anchor;
    state_.mean_velocity = Twist::from_vector(prop.state_prior.mean.tail<6>());
    state_.covariance = prop.state_prior.covariance;
  } else {
    // (4) Laplace covariance, smoothed over time.
    t0 = now_seconds();
    const Mat6d laplace = laplace_covariance(pose_map, masked, *anchor_,
                                             prop.pose_prior, prop.chart_anchor,
                                             config_.tracker);
    const Mat6d smoothed = smooth_covariance(
        laplace, smoothed_cov_ ? &*smoothed_cov_ : nullptr,
        config_.tracker.laplace_ema);
    smoothed_cov_ = smoothed;
    result.timings.laplace = now_seconds() - t0;

    // (5) Velocity fusion into the full-state belief.
    Gaussian pose_belief(pose_boxminus(pose_map, prop.chart_anchor), smoothed);
    state_ = fuse_velocity(pose_belief, prop.vel_given_pose, prop.chart_anchor);

    // (6) Closed-form map update at the posterior mean state.
    t0 = now_seconds();
    try {
      const MapUpdate upd =
          compute_sdf_update(masked, state_.mean_pose, config_.grid, config_.update);
      const ApplyStats stats = apply_update(map_, upd);
      result.map_digest = {stats.updated_voxels, stats.mean_stddev_updated,
                           stats.max_stddev_increase};
    } catch (const EmptyUpdate&) {
    }
    result.timings.map_update = now_seconds() - t0;
  }

  ++frame_index_;
  prev_timestamp_ = obs.timestamp;
  result.state = state_;
  result.timings.total = now_seconds() - t_start;
  return result;
}

RunResult run_sequence(const FilterConfig& config, const FrameSource& next_frame) {
  Filter filter(config);
  RunResult out;
  while (auto input = next_frame()) {
    const StepResult step = filter.step(input->frame, input->control);
    out.trajectory.emplace_back(step.timestamp, step.state);
    out.steps.push_back({step.timestamp, step.map_digest, step.tracking,
                         step.tracking_lost, step.timings});
  }
  if (out.trajectory.empty()) {
    throw InvalidConfig("run_sequence: empty sequence");
  }
  out.final_map = filter.take_map();
  return out;
}

}  // namespace gvslam
