#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include "gvslam/config.hpp"
#include "gvslam/evaluation.hpp"
#include "gvslam/image_io.hpp"
#include "gvslam/parallel.hpp"
#include "gvslam/pipeline.hpp"
#include "gvslam/trajectory_io.hpp"
#include "gvslam/tum_dataset.hpp"
#include "gvslam/worlds.hpp"

namespace fs = std::filesystem;
using namespace gvslam;

namespace {

struct RunOptions {
  std::string config_path;
  std::string out_dir;
  std::string synthetic;
  std::string dataset;
  int64_t seed = -1;
  int threads = 0;
  int render_period = 0;
  int resolution = 0;
  bool no_map = false;
};

void write_groundtruth(const std::string& path,
                       const std::vector<SequenceItem>& items) {
  std::ofstream os(path);
  os << "# timestamp tx ty tz qx qy qz qw\n";
  char line[256];
  for (const auto& item : items) {
    const Vec3d& t = item.gt_pose.translation;
    const Eigen::Quaterniond& q = item.gt_pose.rotation;
    std::snprintf(line, sizeof(line), "%.6f %.9f %.9f %.9f %.9f %.9f %.9f %.9f\n",
                  item.frame.timestamp, t.x(), t.y(), t.z(), q.x(), q.y(), q.z(),
                  q.w());
    os << line;
  }
}

int cmd_run(const RunOptions& opt) {
  AppConfig app = load_app_config(opt.config_path);
  if (!opt.synthetic.empty()) {
    app.profile = "synthetic";
    if (opt.synthetic != "config") app.synthetic_sequence = opt.synthetic;
  }
  if (!opt.dataset.empty()) app.tum_directory = opt.dataset;
  if (opt.seed >= 0) app.filter.seed = uint64_t(opt.seed);
  if (opt.threads > 0) app.threads = opt.threads;
  if (opt.render_period > 0) app.filter.render_period = opt.render_period;
  if (opt.resolution > 0) {
    const double voxel_before = app.filter.grid.voxel_size();
    app.filter.grid.resolution = Eigen::Vector3i::Constant(opt.resolution);
    const double scale = app.filter.grid.voxel_size() / voxel_before;
    app.filter.render.step_eps *= scale;
    app.filter.update.truncation *= scale;
  }
  set_thread_count(app.threads);

  fs::create_directories(opt.out_dir);
  const bool synthetic_input = !opt.synthetic.empty() ||
                               (opt.dataset.empty() && app.profile == "synthetic");

  RunResult result;
  if (synthetic_input) {
    const SyntheticSetup setup = make_synthetic_setup(app);
    const auto items =
        synthesize_sequence(setup.scene, setup.sequence, app.filter.seed);
    app.filter.initial_state.mean_pose = items[0].gt_pose;
    app.filter.initial_state.mean_velocity = items[0].gt_velocity;
    app.filter.initial_state.covariance.setZero();
    write_groundtruth(opt.out_dir + "/groundtruth.txt", items);

    size_t index = 0;
    result = run_sequence(app.filter, [&]() -> std::optional<PipelineInput> {
      if (index >= items.size()) return std::nullopt;
      const SequenceItem& item = items[index++];
      PipelineInput input{item.frame, std::nullopt};
      if (item.has_control) input.control = item.control;
      return input;
    });
  } else {
    if (app.tum_directory.empty()) {
      throw InvalidConfig("no input: set --dataset, --synthetic or tum.directory");
    }
    TumLoadConfig load;
    load.intrinsics = app.tum_full_intrinsics;
    load.out_width = app.camera.width;
    load.out_height = app.camera.height;
    const auto items = load_tum_rgbd(app.tum_directory, load);
    if (items[0].gt_pose) {
      app.filter.initial_state.mean_pose = *items[0].gt_pose;
      app.filter.initial_state.covariance.setZero();
    }
    size_t index = 0;
    result = run_sequence(app.filter, [&]() -> std::optional<PipelineInput> {
      if (index >= items.size()) return std::nullopt;
      return PipelineInput{items[index++].frame, std::nullopt};
    });
  }

  write_tum_trajectory(opt.out_dir + "/trajectory.txt", result.trajectory);
  write_covariances_csv(opt.out_dir + "/covariances.csv", result.trajectory);
  write_timings_csv(opt.out_dir + "/timings.csv", result.steps);
  if (!opt.no_map) save_map(result.final_map, opt.out_dir + "/map.bin");
  std::ofstream cfg(opt.out_dir + "/effective_config.toml");
  cfg << effective_config(app).serialize();

  int lost = 0;
  double total = 0;
  for (const auto& s : result.steps) {
    lost += s.tracking_lost;
    total += s.timings.total;
  }
  std::printf("processed %zu frames (%.2f s, %d tracking losses)\n",
              result.trajectory.size(), total, lost);
  std::printf("outputs in %s: trajectory.txt covariances.csv timings.csv%s\n",
              opt.out_dir.c_str(), opt.no_map ? "" : " map.bin");
  return 0;
}

struct RenderOptions {
  std::string map_path;
  std::string out_dir;
  std::string config_path;
  std::vector<double> pose;
  std::string trajectory;
  int index = 0;
  std::string slice_axis = "z";
  int slice_index = -1;
  int slice_channel = 0;
  int threads = 0;
};

int cmd_render(const RenderOptions& opt) {
  set_thread_count(opt.threads);
  const VoxelMapBelief map = load_map(opt.map_path);

  AppConfig app;
  if (!opt.config_path.empty()) {
    app = load_app_config(opt.config_path);
  } else {
    app = build_app_config(ConfigTree::parse_string("", "<default>"));
  }
  RenderParams params = app.filter.render;
  params.step_eps = 0.4 * map.spec.voxel_size();

  Pose pose;
  if (opt.pose.size() == 7) {
    pose = Pose(Vec3d(opt.pose[0], opt.pose[1], opt.pose[2]),
                Eigen::Quaterniond(opt.pose[6], opt.pose[3], opt.pose[4], opt.pose[5]));
  } else if (!opt.trajectory.empty()) {
    const auto entries = read_tum_trajectory(opt.trajectory);
    if (opt.index < 0 || opt.index >= int(entries.size())) {
      throw InvalidConfig("--index outside the trajectory");
    }
    pose = entries[opt.index].pose;
  }

  fs::create_directories(opt.out_dir);
  const RgbdFrame frame = render_rgbd(pose, map, app.camera, params);
  write_png_rgb(opt.out_dir + "/color.png", frame.color);
  write_depth_png(opt.out_dir + "/depth.png", frame.depth, frame.valid);

  const Axis axis = opt.slice_axis == "x"   ? Axis::X
                    : opt.slice_axis == "y" ? Axis::Y
                                            : Axis::Z;
  const int max_index = map.spec.resolution[int(axis)];
  const int index = opt.slice_index >= 0 ? opt.slice_index : max_index / 2;
  const Image<float> slice = uncertainty_slice(map, axis, index, opt.slice_channel);
  write_csv(opt.out_dir + "/uncertainty_slice.csv", slice);
  float max_value = 1e-9f;
  for (int r = 0; r < slice.height(); ++r)
    for (int c = 0; c < slice.width(); ++c) max_value = std::max(max_value, slice(r, c));
  Image<uint16_t> gray(slice.height(), slice.width());
  for (int r = 0; r < slice.height(); ++r)
    for (int c = 0; c < slice.width(); ++c)
      gray(r, c) = uint16_t(65535.0f * slice(r, c) / max_value);
  write_png_gray16(opt.out_dir + "/uncertainty_slice.png", gray);

  int valid = 0;
  for (int r = 0; r < frame.height(); ++r)
    for (int c = 0; c < frame.width(); ++c) valid += frame.valid(r, c);
  std::printf("rendered %dx%d (%d valid pixels); slice %s[%d] channel %d\n",
              frame.width(), frame.height(), valid, opt.slice_axis.c_str(), index,
              opt.slice_channel);
  return 0;
}

struct EvalOptions {
  std::string trajectory;
  std::string groundtruth;
  std::string covariances;
  std::string out_dir;
  bool align = false;
  double window = 0.020;
};

int cmd_eval(const EvalOptions& opt) {
  const auto est = read_tum_trajectory(opt.trajectory);
  const auto gt = read_tum_trajectory(opt.groundtruth);
  const double rmse = ate_rmse(est, gt, opt.align, opt.window);
  std::printf("ate_rmse_m %.6f (%s)\n", rmse, opt.align ? "aligned" : "unaligned");

  if (!opt.out_dir.empty()) fs::create_directories(opt.out_dir);
  std::ofstream summary;
  if (!opt.out_dir.empty()) {
    summary.open(opt.out_dir + "/summary.txt");
    summary << "ate_rmse_m " << rmse << "\n";
  }

  if (opt.covariances.empty()) return 0;
  const auto records = read_covariances_csv(opt.covariances);

  // Associate estimate/covariance rows with ground truth by timestamp.
  std::vector<Pose> est_poses, gt_poses;
  std::vector<Mat6d> covs;
  std::vector<Vec6d> residuals;
  for (size_t i = 0; i < est.size() && i < records.size(); ++i) {
    int best = -1;
    double best_dt = opt.window;
    for (size_t j = 0; j < gt.size(); ++j) {
      const double dt = std::abs(gt[j].stamp - est[i].stamp);
      if (dt <= best_dt) {
        best_dt = dt;
        best = int(j);
      }
    }
    if (best < 0) continue;
    est_poses.push_back(est[i].pose);
    gt_poses.push_back(gt[best].pose);
    covs.push_back(records[i].pose_covariance);
    residuals.push_back(pose_boxminus(gt[best].pose, est[i].pose));
  }
  if (residuals.size() < 2) throw NoAssociations("eval: too few associated frames");

  const double s = global_scale_correction(residuals, covs);
  const double s_safe = s > 0 ? s : 1.0;
  const WhitenedResiduals whitened =
      whitened_residuals(est_poses, covs, gt_poses, s_safe);
  const auto nssr = nssr_samples(est_poses, covs, gt_poses, s_safe);
  std::optional<CalibrationCurve> curve;
  try {
    curve = chi_squared_curve(nssr, 6);
  } catch (const TooFewSamples&) {
    std::printf("calibration curve skipped: fewer than 10 samples\n");
  }

  std::printf("scale_correction_s %.6f\n", s);
  std::printf("whitened_stddev");
  for (int d = 0; d < 6; ++d) std::printf(" %.4f", whitened.per_dimension_stddev[d]);
  std::printf("\n");
  if (curve) std::printf("kolmogorov_distance %.6f\n", curve->kolmogorov);

  if (!opt.out_dir.empty()) {
    summary << "scale_correction_s " << s << "\n";
    summary << "whitened_stddev";
    for (int d = 0; d < 6; ++d) summary << " " << whitened.per_dimension_stddev[d];
    summary << "\n";
    if (curve) {
      summary << "kolmogorov_distance " << curve->kolmogorov << "\n";
      std::ofstream curve_csv(opt.out_dir + "/calibration_curve.csv");
      curve_csv << "nssr,predicted_cdf,observed_cdf\n";
      for (size_t i = 0; i < curve->nssr.size(); ++i) {
        curve_csv << curve->nssr[i] << ',' << curve->predicted[i] << ','
                  << curve->observed[i] << "\n";
      }
    }
    std::ofstream hist(opt.out_dir + "/whitened_residuals.csv");
    hist << "w0,w1,w2,w3,w4,w5\n";
    for (const Vec6d& w : whitened.samples) {
      for (int d = 0; d < 6; ++d) hist << (d ? "," : "") << w[d];
      hist << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli("gvslam: probabilistic RGB-D SLAM with Gaussian voxel maps");
  cli.require_subcommand(1);

  RunOptions run_opt;
  CLI::App* run = cli.add_subcommand("run", "run the filter over a sequence");
  run->add_option("--config", run_opt.config_path, "config file")->required();
  run->add_option("--out", run_opt.out_dir, "output directory")->required();
  run->add_option("--synthetic", run_opt.synthetic,
                  "synthetic sequence name (room_orbit | static | config)");
  run->add_option("--dataset", run_opt.dataset, "TUM-RGBD directory");
  run->add_option("--seed", run_opt.seed, "RNG seed override");
  run->add_option("--threads", run_opt.threads, "worker thread cap");
  run->add_option("--render-period", run_opt.render_period, "anchor refresh period");
  run->add_option("--resolution", run_opt.resolution,
                  "voxels per grid axis (e.g. 200 or 400)");
  run->add_flag("--no-map", run_opt.no_map, "skip writing map.bin");

  RenderOptions render_opt;
  CLI::App* render = cli.add_subcommand("render", "render a map snapshot");
  render->add_option("--map", render_opt.map_path, "map snapshot")->required();
  render->add_option("--out", render_opt.out_dir, "output directory")->required();
  render->add_option("--config", render_opt.config_path, "config for the camera");
  render->add_option("--pose", render_opt.pose, "tx ty tz qx qy qz qw")->expected(7);
  render->add_option("--trajectory", render_opt.trajectory,
                     "take the pose from this file");
  render->add_option("--index", render_opt.index, "row in --trajectory");
  render->add_option("--slice-axis", render_opt.slice_axis, "x | y | z");
  render->add_option("--slice-index", render_opt.slice_index, "plane index");
  render->add_option("--slice-channel", render_opt.slice_channel, "0..3");
  render->add_option("--threads", render_opt.threads, "worker thread cap");

  EvalOptions eval_opt;
  CLI::App* eval = cli.add_subcommand("eval", "trajectory accuracy and calibration");
  eval->add_option("--trajectory", eval_opt.trajectory, "estimated trajectory")
      ->required();
  eval->add_option("--groundtruth", eval_opt.groundtruth, "ground-truth trajectory")
      ->required();
  eval->add_option("--covariances", eval_opt.covariances, "covariance sidecar CSV");
  eval->add_option("--out", eval_opt.out_dir, "output directory for curves");
  eval->add_flag("--align,!--no-align", eval_opt.align, "rigid SE(3) alignment");
  eval->add_option("--window", eval_opt.window, "association window, seconds");

  CLI11_PARSE(cli, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_opt);
    if (render->parsed()) return cmd_render(render_opt);
    if (eval->parsed()) return cmd_eval(eval_opt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
