#include "gvslam/trajectory_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "gvslam/errors.hpp"

namespace gvslam {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_write(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "w"));
  if (!f) throw IoError("cannot open for writing: " + path);
  return f;
}

}  // namespace

void write_tum_trajectory(
    const std::string& path,
    const std::vector<std::pair<double, StateBelief>>& trajectory) {
  FilePtr f = open_write(path);
  std::fprintf(f.get(), "# timestamp tx ty tz qx qy qz qw\n");
  for (const auto& [stamp, state] : trajectory) {
    const Vec3d& t = state.mean_pose.translation;
    const Eigen::Quaterniond& q = state.mean_pose.rotation;
    std::fprintf(f.get(), "%.6f %.9f %.9f %.9f %.9f %.9f %.9f %.9f\n", stamp,
                 t.x(), t.y(), t.z(), q.x(), q.y(), q.z(), q.w());
  }
}

std::vector<TimedPoseEntry> read_tum_trajectory(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::vector<TimedPoseEntry> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double t, tx, ty, tz, qx, qy, qz, qw;
    if (ss >> t >> tx >> ty >> tz >> qx >> qy >> qz >> qw) {
      out.push_back({t, Pose(Vec3d(tx, ty, tz), Eigen::Quaterniond(qw, qx, qy, qz))});
    }
  }
  if (out.empty()) throw ParseError("no trajectory rows in " + path);
  return out;
}

void write_covariances_csv(
    const std::string& path,
    const std::vector<std::pair<double, StateBelief>>& trajectory) {
  FilePtr f = open_write(path);
  std::fprintf(f.get(),
               "# timestamp,cov_upper_triangle_21(pose tangent at mean),"
               "state_mean_12(tx ty tz rx ry rz vx vy vz wx wy wz)\n");
  for (const auto& [stamp, state] : trajectory) {
    std::fprintf(f.get(), "%.6f", stamp);
    for (int i = 0; i < 6; ++i) {
      for (int j = i; j < 6; ++j) {
        std::fprintf(f.get(), ",%.12e", state.covariance(i, j));
      }
    }
    const Vec6d tangent = pose_log(state.mean_pose);
    for (int i = 0; i < 6; ++i) std::fprintf(f.get(), ",%.12e", tangent[i]);
    const Vec6d vel = state.mean_velocity.vector();
    for (int i = 0; i < 6; ++i) std::fprintf(f.get(), ",%.12e", vel[i]);
    std::fprintf(f.get(), "\n");
  }
}

std::vector<CovarianceRecord> read_covariances_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::vector<CovarianceRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::vector<double> values;
    std::string cell;
    while (std::getline(ss, cell, ',')) values.push_back(std::stod(cell));
    if (values.size() != 1 + 21 + 12) {
      throw ParseError("covariance row must have 34 columns: " + path);
    }
    CovarianceRecord rec;
    rec.stamp = values[0];
    int idx = 1;
    for (int i = 0; i < 6; ++i) {
      for (int j = i; j < 6; ++j) {
        rec.pose_covariance(i, j) = values[idx];
        rec.pose_covariance(j, i) = values[idx];
        ++idx;
      }
    }
    for (int i = 0; i < 6; ++i) rec.pose_tangent[i] = values[idx++];
    for (int i = 0; i < 6; ++i) rec.velocity[i] = values[idx++];
    out.push_back(rec);
  }
  if (out.empty()) throw ParseError("no covariance rows in " + path);
  return out;
}

void write_timings_csv(const std::string& path, const std::vector<StepSummary>& steps) {
  FilePtr f = open_write(path);
  std::fprintf(f.get(),
               "frame,timestamp,propagate_s,render_s,track_s,laplace_s,"
               "map_update_s,total_s,updated_voxels,mean_stddev,"
               "valid_pixel_fraction,final_objective,tracking_lost\n");
  for (size_t i = 0; i < steps.size(); ++i) {
    const StepSummary& s = steps[i];
    std::fprintf(f.get(),
                 "%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%" PRId64
                 ",%.6e,%.4f,%.6e,%d\n",
                 i, s.timestamp, s.timings.propagate, s.timings.render,
                 s.timings.track, s.timings.laplace, s.timings.map_update,
                 s.timings.total, s.map_digest.updated_voxels,
                 s.map_digest.mean_stddev, s.tracking.valid_pixel_fraction,
                 s.tracking.final_objective, s.tracking_lost ? 1 : 0);
  }
}

}  // namespace gvslam
