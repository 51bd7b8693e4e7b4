#pragma once

#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "gvslam/dynamics.hpp"
#include "gvslam/renderer.hpp"
#include "gvslam/state.hpp"
#include "gvslam/tracker.hpp"
#include "gvslam/voxel_map.hpp"

namespace gvslam {

struct FilterConfig {
  GridSpec grid;
  RenderParams render;
  TransitionParams transition;
  TrackerParams tracker;
  UpdateParams update;
  int render_period = 1;           // anchor refresh period, frames
  StateBelief initial_state;       // the given x_1
  uint64_t seed = 0;
  bool use_frame_timestamps = true;  // dt from timestamps when increasing

  void validate() const;
};

struct MapDigest {
  int64_t updated_voxels = 0;
  double mean_stddev = 0.0;          // occupancy channel, updated voxels
  double max_stddev_increase = 0.0;  // > 0 would break monotone certainty
};

struct StepTimings {
  double propagate = 0, render = 0, track = 0, laplace = 0, map_update = 0;
  double total = 0;  // seconds
};

struct StepResult {
  StateBelief state;
  MapDigest map_digest;
  TrackingDiagnostics tracking;
  bool tracking_lost = false;
  StepTimings timings;
  double timestamp = 0.0;
};

/// Per-frame marginal filter. The first frame is fused at the given initial
/// state without tracking; every later frame runs, in order: belief
/// propagation, periodic anchor refresh (rendered from the map mean at the
/// previous mean pose), MAP pose optimization, Laplace covariance with EMA
/// smoothing, velocity fusion, then the closed-form map update at the new
/// posterior mean. On TrackingLost the state coasts on the propagated prior
/// and the map update is skipped.
class Filter {
 public:
  explicit Filter(const FilterConfig& config);

  StepResult step(const RgbdFrame& obs, const std::optional<Control>& control);

  const StateBelief& state() const { return state_; }
  const VoxelMapBelief& map() const { return map_; }
  VoxelMapBelief take_map() { return std::move(map_); }
  int frames_consumed() const { return frame_index_; }

 private:
  FilterConfig config_;
  VoxelMapBelief map_;
  StateBelief state_;
  std::optional<AnchorFrame> anchor_;
  std::optional<Mat6d> smoothed_cov_;
  std::mt19937_64 rng_;
  int frame_index_ = 0;
  double prev_timestamp_ = 0.0;
};

/// Invalidates valid pixels whose 4-neighborhood depth range (including the
/// pixel) exceeds the threshold.
void mask_depth_discontinuities(RgbdFrame& frame, double threshold);

struct PipelineInput {
  RgbdFrame frame;
  std::optional<Control> control;
};

using FrameSource = std::function<std::optional<PipelineInput>()>;

struct StepSummary {
  double timestamp = 0.0;
  MapDigest map_digest;
  TrackingDiagnostics tracking;
  bool tracking_lost = false;
  StepTimings timings;
};

struct RunResult {
  std::vector<std::pair<double, StateBelief>> trajectory;  // one per frame
  std::vector<StepSummary> steps;
  VoxelMapBelief final_map;
};

/// Streams frames through the filter; continues after TrackingLost (the frame
/// is flagged and the state coasts).
RunResult run_sequence(const FilterConfig& config, const FrameSource& next_frame);

}  // namespace gvslam
