#include "gvslam/tum_dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gvslam/errors.hpp"
#include "gvslam/image_io.hpp"

namespace gvslam {

namespace {

struct TimedPath {
  double stamp;
  std::string path;
};

std::vector<TimedPath> read_index(const std::string& file) {
  std::ifstream is(file);
  if (!is) throw MissingIndexFile("missing index file: " + file);
  std::vector<TimedPath> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    TimedPath item;
    if (ss >> item.stamp >> item.path) out.push_back(item);
  }
  std::sort(out.begin(), out.end(),
            [](const TimedPath& a, const TimedPath& b) { return a.stamp < b.stamp; });
  return out;
}

struct TimedPose {
  double stamp;
  Pose pose;
};

std::vector<TimedPose> read_groundtruth(const std::string& file) {
  std::ifstream is(file);
  std::vector<TimedPose> out;
  if (!is) return out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double t, tx, ty, tz, qx, qy, qz, qw;
    if (ss >> t >> tx >> ty >> tz >> qx >> qy >> qz >> qw) {
      out.push_back({t, Pose(Vec3d(tx, ty, tz),
                             Eigen::Quaterniond(qw, qx, qy, qz))});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const TimedPose& a, const TimedPose& b) { return a.stamp < b.stamp; });
  return out;
}

/// Index of the element with the nearest stamp, or -1 if outside the window.
template <typename T>
int nearest_within(const std::vector<T>& items, double stamp, double window) {
  if (items.empty()) return -1;
  auto it = std::lower_bound(
      items.begin(), items.end(), stamp,
      [](const T& item, double s) { return item.stamp < s; });
  int best = -1;
  double best_dt = window;
  for (auto cand : {it, it == items.begin() ? it : std::prev(it)}) {
    if (cand == items.end()) continue;
    const double dt = std::abs(cand->stamp - stamp);
    if (dt <= best_dt) {
      best_dt = dt;
      best = int(cand - items.begin());
    }
  }
  return best;
}

CameraIntrinsics scale_intrinsics(const CameraIntrinsics& k, int out_w, int out_h) {
  const double sx = double(out_w) / k.width;
  const double sy = double(out_h) / k.height;
  CameraIntrinsics out = k;
  out.fx = k.fx * sx;
  out.fy = k.fy * sy;
  // Pixel centers sit at integer coordinates, hence the half-pixel shift.
  out.cx = (k.cx + 0.5) * sx - 0.5;
  out.cy = (k.cy + 0.5) * sy - 0.5;
  out.width = out_w;
  out.height = out_h;
  return out;
}

}  // namespace

std::vector<TumItem> load_tum_rgbd(const std::string& directory,
                                   const TumLoadConfig& config) {
  const auto rgb_index = read_index(directory + "/rgb.txt");
  const auto depth_index = read_index(directory + "/depth.txt");
  const auto gt = read_groundtruth(directory + "/groundtruth.txt");

  const CameraIntrinsics& k_full = config.intrinsics;
  if (k_full.width % config.out_width != 0 || k_full.height % config.out_height != 0 ||
      k_full.width / config.out_width != k_full.height / config.out_height) {
    throw InvalidConfig("load_tum_rgbd: output resolution must divide the input");
  }
  const int factor = k_full.width / config.out_width;
  CameraIntrinsics k_out = scale_intrinsics(k_full, config.out_width, config.out_height);
  k_out.validate();

  std::vector<TumItem> out;
  for (const TimedPath& rgb : rgb_index) {
    const int di = nearest_within(depth_index, rgb.stamp, config.association_window);
    if (di < 0) continue;

    const Image<Vec3f> rgb_full = read_png_rgb(directory + "/" + rgb.path);
    const Image<uint16_t> depth_full =
        read_png_gray16(directory + "/" + depth_index[di].path);
    if (rgb_full.width() != k_full.width || rgb_full.height() != k_full.height ||
        depth_full.width() != k_full.width || depth_full.height() != k_full.height) {
      throw ParseError("load_tum_rgbd: image size does not match intrinsics");
    }

    TumItem item;
    item.frame = RgbdFrame(k_out, rgb.stamp);
    for (int r = 0; r < config.out_height; ++r) {
      for (int c = 0; c < config.out_width; ++c) {
        Vec3f color_sum = Vec3f::Zero();
        double depth_sum = 0.0;
        int depth_count = 0;
        for (int dr = 0; dr < factor; ++dr) {
          for (int dc = 0; dc < factor; ++dc) {
            const int rr = r * factor + dr;
            const int cc = c * factor + dc;
            color_sum += rgb_full(rr, cc);
            const uint16_t raw = depth_full(rr, cc);
            if (raw > 0) {
              depth_sum += double(raw) / config.depth_scale;
              ++depth_count;
            }
          }
        }
        item.frame.color(r, c) = color_sum / float(factor * factor);
        if (depth_count > 0) {
          const double d = depth_sum / depth_count;
          if (d > 0 && d <= k_out.max_depth) {
            item.frame.depth(r, c) = float(d);
            item.frame.valid(r, c) = 1;
          }
        }
      }
    }

    const int gi = nearest_within(gt, rgb.stamp, config.association_window);
    if (gi >= 0) item.gt_pose = gt[gi].pose;
    out.push_back(std::move(item));
  }
  if (out.empty()) {
    throw NoAssociations("load_tum_rgbd: no rgb/depth pairs inside the window");
  }
  return out;
}

}  // namespace gvslam
