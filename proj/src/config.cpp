#include "gvslam/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gvslam/errors.hpp"

namespace gvslam {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& what) {
  throw ParseError(name + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

ConfigTree ConfigTree::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_string(ss.str(), path);
}

ConfigTree ConfigTree::parse_string(const std::string& text, const std::string& name) {
  ConfigTree tree;
  tree.name_ = name;
  std::istringstream is(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    // Strip comments outside quotes.
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(name, line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(name, line_no, "empty section name");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(name, line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string raw = trim(line.substr(eq + 1));
    if (key.empty()) fail(name, line_no, "empty key");
    if (raw.empty()) fail(name, line_no, "empty value");
    const std::string full = section.empty() ? key : section + "." + key;

    Value value;
    if (raw.front() == '"') {
      if (raw.size() < 2 || raw.back() != '"') fail(name, line_no, "unterminated string");
      value.kind = Value::Kind::Text;
      value.str = raw.substr(1, raw.size() - 2);
    } else if (raw == "true" || raw == "false") {
      value.kind = Value::Kind::Bool;
      value.flag = raw == "true";
    } else if (raw.front() == '[') {
      if (raw.back() != ']') fail(name, line_no, "unterminated array");
      value.kind = Value::Kind::Array;
      std::istringstream as(raw.substr(1, raw.size() - 2));
      std::string cell;
      while (std::getline(as, cell, ',')) {
        cell = trim(cell);
        if (cell.empty()) continue;
        try {
          value.arr.push_back(std::stod(cell));
        } catch (const std::exception&) {
          fail(name, line_no, "bad array element '" + cell + "'");
        }
      }
    } else {
      value.kind = Value::Kind::Number;
      try {
        size_t used = 0;
        value.num = std::stod(raw, &used);
        if (used != raw.size()) fail(name, line_no, "trailing junk after number");
      } catch (const ParseError&) {
        throw;
      } catch (const std::exception&) {
        fail(name, line_no, "bad value '" + raw + "'");
      }
    }
    tree.values_[full] = value;
  }
  return tree;
}

bool ConfigTree::has(const std::string& key) const { return values_.count(key) > 0; }

double ConfigTree::number(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second.kind != Value::Kind::Number) {
    throw ParseError(name_ + ": key '" + key + "' is not a number");
  }
  return it->second.num;
}

double ConfigTree::number(const std::string& key) const {
  if (!has(key)) throw ParseError(name_ + ": missing required key '" + key + "'");
  return number(key, 0.0);
}

std::string ConfigTree::text(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second.kind != Value::Kind::Text) {
    throw ParseError(name_ + ": key '" + key + "' is not a string");
  }
  return it->second.str;
}

bool ConfigTree::boolean(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second.kind != Value::Kind::Bool) {
    throw ParseError(name_ + ": key '" + key + "' is not a boolean");
  }
  return it->second.flag;
}

std::vector<double> ConfigTree::array(const std::string& key,
                                      const std::vector<double>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second.kind != Value::Kind::Array) {
    throw ParseError(name_ + ": key '" + key + "' is not an array");
  }
  return it->second.arr;
}

void ConfigTree::set_number(const std::string& key, double v) {
  Value value;
  value.kind = Value::Kind::Number;
  value.num = v;
  values_[key] = value;
}

void ConfigTree::set_text(const std::string& key, const std::string& v) {
  Value value;
  value.kind = Value::Kind::Text;
  value.str = v;
  values_[key] = value;
}

void ConfigTree::set_bool(const std::string& key, bool v) {
  Value value;
  value.kind = Value::Kind::Bool;
  value.flag = v;
  values_[key] = value;
}

void ConfigTree::set_array(const std::string& key, const std::vector<double>& v) {
  Value value;
  value.kind = Value::Kind::Array;
  value.arr = v;
  values_[key] = value;
}

std::string ConfigTree::serialize() const {
  std::ostringstream os;
  os.precision(17);
  std::string current_section;
  bool first = true;
  // Top-level keys must precede every [section] header.
  std::vector<std::pair<std::string, const Value*>> ordered;
  for (const auto& [full, value] : values_) {
    if (full.find('.') == std::string::npos) ordered.emplace_back(full, &value);
  }
  for (const auto& [full, value] : values_) {
    if (full.find('.') != std::string::npos) ordered.emplace_back(full, &value);
  }
  for (const auto& [full, value_ptr] : ordered) {
    const Value& value = *value_ptr;
    const auto dot = full.rfind('.');
    const std::string section = dot == std::string::npos ? "" : full.substr(0, dot);
    const std::string key = dot == std::string::npos ? full : full.substr(dot + 1);
    if (section != current_section || first) {
      if (!first) os << "\n";
      if (!section.empty()) os << "[" << section << "]\n";
      current_section = section;
    }
    first = false;
    os << key << " = ";
    switch (value.kind) {
      case Value::Kind::Number:
        os << value.num;
        break;
      case Value::Kind::Text:
        os << '"' << value.str << '"';
        break;
      case Value::Kind::Bool:
        os << (value.flag ? "true" : "false");
        break;
      case Value::Kind::Array: {
        os << '[';
        for (size_t i = 0; i < value.arr.size(); ++i) {
          if (i) os << ", ";
          os << value.arr[i];
        }
        os << ']';
        break;
      }
    }
    os << "\n";
  }
  return os.str();
}

namespace {

struct ProfileDefaults {
  int width, height;
  double fx, fy, cx, cy;
  double max_depth;
  double grid_extent;
  double truncation_scale;
  double sigma_color, sigma_geo;
};

ProfileDefaults profile_defaults(const std::string& profile) {
  if (profile == "euroc") {
    return {80, 60, 48.7, 48.7, 39.5, 29.5, 7.0, 14.0, 2.0, 0.1, 0.02};
  }
  if (profile == "tum") {
    return {160, 120, 131.25, 129.25, 79.5, 59.5, 8.0, 14.0, 2.0, 0.1, 0.02};
  }
  if (profile == "blackbird") {
    return {256, 192, 130.0, 130.0, 127.5, 95.5, 20.0, 25.0, 4.0, 0.02, 0.2};
  }
  if (profile == "synthetic") {
    return {80, 60, 70.0, 70.0, 39.5, 29.5, 8.0, 14.0, 2.0, 0.1, 0.02};
  }
  throw InvalidConfig("unknown profile '" + profile +
                      "' (euroc | tum | blackbird | synthetic)");
}

Vec3d vec3_from(const std::vector<double>& v, const char* what) {
  if (v.size() != 3) throw InvalidConfig(std::string(what) + " needs 3 elements");
  return Vec3d(v[0], v[1], v[2]);
}

}  // namespace

AppConfig build_app_config(const ConfigTree& tree) {
  AppConfig app;
  app.profile = tree.text("profile", "synthetic");
  const ProfileDefaults d = profile_defaults(app.profile);

  app.threads = int(tree.number("threads", 0));

  app.camera.width = int(tree.number("camera.width", d.width));
  app.camera.height = int(tree.number("camera.height", d.height));
  app.camera.fx = tree.number("camera.fx", d.fx);
  app.camera.fy = tree.number("camera.fy", d.fy);
  app.camera.cx = tree.number("camera.cx", (app.camera.width - 1) / 2.0);
  app.camera.cy = tree.number("camera.cy", (app.camera.height - 1) / 2.0);
  app.camera.max_depth = tree.number("camera.max_depth", d.max_depth);
  app.camera.validate();

  FilterConfig& f = app.filter;
  const double extent = tree.number("grid.extent", d.grid_extent);
  const int resolution = int(tree.number("grid.resolution", 200));
  const Vec3d center = vec3_from(tree.array("grid.center", {0, 0, 0}), "grid.center");
  f.grid.extent = Vec3d::Constant(extent);
  f.grid.origin = center - 0.5 * f.grid.extent;
  f.grid.resolution = Eigen::Vector3i::Constant(resolution);
  const double voxel = f.grid.voxel_size();

  f.render.step_eps =
      tree.number("render.step_eps", tree.number("render.step_scale", 0.4) * voxel);
  f.render.tau = tree.number("render.tau", 0.0);
  f.render.max_depth = tree.number("render.max_depth", app.camera.max_depth);
  f.render.sigma_color = tree.number("render.sigma_color", d.sigma_color);
  f.render.sigma_geo = tree.number("render.sigma_geo", d.sigma_geo);

  f.update.truncation = tree.number(
      "update.truncation",
      tree.number("update.truncation_scale", d.truncation_scale) * voxel);
  f.update.sigma_update = tree.number("update.sigma_update", 1.0);

  f.transition.dt = tree.number("transition.dt", 0.1);
  const double svt = tree.number("transition.sigma_vel_translation", 0.03);
  const double svr = tree.number("transition.sigma_vel_rotation", 0.03);
  const double spt = tree.number("transition.sigma_pose_translation", 0.05);
  const double spr = tree.number("transition.sigma_pose_rotation", 0.02);
  f.transition.sigma_vel << svt, svt, svt, svr, svr, svr;
  f.transition.sigma_pose << spt, spt, spt, spr, spr, spr;
  f.transition.accel_dt_power = tree.number("transition.accel_dt_power", 2.0);

  f.tracker.steps = int(tree.number("tracker.steps", 1000));
  f.tracker.lr_translation = tree.number("tracker.lr_translation", 0.001);
  f.tracker.lr_rotation = tree.number("tracker.lr_rotation", 0.00036);
  f.tracker.pixel_samples = int(tree.number("tracker.pixel_samples", 200));
  f.tracker.geo_outlier = tree.number("tracker.geo_outlier", 0.45);
  f.tracker.photo_outlier = tree.number("tracker.photo_outlier", 0.15);
  f.tracker.laplace_ema = tree.number("tracker.laplace_ema", 0.8);
  f.tracker.damping = tree.number("tracker.damping", 1e-8);
  f.tracker.sigma_geo = f.render.sigma_geo;
  f.tracker.sigma_color = f.render.sigma_color;

  f.render_period = int(tree.number("pipeline.render_period", 1));
  f.use_frame_timestamps = tree.boolean("pipeline.use_frame_timestamps", true);
  f.seed = uint64_t(tree.number("seed", 0));

  const Vec3d p0 = vec3_from(tree.array("initial_state.position", {0, 0, 0}),
                             "initial_state.position");
  const auto q0 = tree.array("initial_state.quaternion", {1, 0, 0, 0});
  if (q0.size() != 4) throw InvalidConfig("initial_state.quaternion needs 4 elements");
  f.initial_state.mean_pose =
      Pose(p0, Eigen::Quaterniond(q0[0], q0[1], q0[2], q0[3]));
  const auto v0 = tree.array("initial_state.velocity", {0, 0, 0, 0, 0, 0});
  if (v0.size() != 6) throw InvalidConfig("initial_state.velocity needs 6 elements");
  f.initial_state.mean_velocity =
      Twist::from_vector(Eigen::Map<const Vec6d>(v0.data()));

  app.synthetic_sequence = tree.text("synthetic.sequence", "room_orbit");
  app.synthetic_frames = int(tree.number("synthetic.frames", 100));
  app.synthetic_fps = tree.number("synthetic.fps", 10.0);
  app.synthetic_orbit_radius = tree.number("synthetic.orbit_radius", 1.0);
  app.synthetic_orbit_span_deg = tree.number("synthetic.orbit_span_deg", 120.0);
  app.synthetic_depth_noise = tree.number("synthetic.depth_noise", 0.0);
  app.synthetic_color_noise = tree.number("synthetic.color_noise", 0.0);
  app.synthetic_scene = tree.text("synthetic.scene", "room");
  app.synthetic_checker_scale = tree.number("synthetic.checker_scale", -1.0);
  app.synthetic_boxes = tree.array("synthetic.boxes", {});
  app.synthetic_spheres = tree.array("synthetic.spheres", {});

  app.tum_directory = tree.text("tum.directory", "");
  app.tum_full_intrinsics.width = int(tree.number("tum.width_full", 640));
  app.tum_full_intrinsics.height = int(tree.number("tum.height_full", 480));
  app.tum_full_intrinsics.fx = tree.number("tum.fx", 525.0);
  app.tum_full_intrinsics.fy = tree.number("tum.fy", 525.0);
  app.tum_full_intrinsics.cx = tree.number("tum.cx", 319.5);
  app.tum_full_intrinsics.cy = tree.number("tum.cy", 239.5);
  app.tum_full_intrinsics.max_depth = app.camera.max_depth;

  app.filter.validate();
  return app;
}

AppConfig load_app_config(const std::string& path) {
  return build_app_config(ConfigTree::parse_file(path));
}

ConfigTree effective_config(const AppConfig& app) {
  ConfigTree t;
  t.set_text("profile", app.profile);
  t.set_number("seed", double(app.filter.seed));
  t.set_number("threads", app.threads);

  t.set_number("camera.width", app.camera.width);
  t.set_number("camera.height", app.camera.height);
  t.set_number("camera.fx", app.camera.fx);
  t.set_number("camera.fy", app.camera.fy);
  t.set_number("camera.cx", app.camera.cx);
  t.set_number("camera.cy", app.camera.cy);
  t.set_number("camera.max_depth", app.camera.max_depth);

  const FilterConfig& f = app.filter;
  const Vec3d center = f.grid.origin + 0.5 * f.grid.extent;
  t.set_array("grid.center", {center.x(), center.y(), center.z()});
  t.set_number("grid.extent", f.grid.extent.x());
  t.set_number("grid.resolution", f.grid.resolution.x());

  t.set_number("render.step_eps", f.render.step_eps);
  t.set_number("render.tau", f.render.tau);
  t.set_number("render.max_depth", f.render.max_depth);
  t.set_number("render.sigma_color", f.render.sigma_color);
  t.set_number("render.sigma_geo", f.render.sigma_geo);

  t.set_number("update.truncation", f.update.truncation);
  t.set_number("update.sigma_update", f.update.sigma_update);

  t.set_number("transition.dt", f.transition.dt);
  t.set_number("transition.sigma_vel_translation", f.transition.sigma_vel[0]);
  t.set_number("transition.sigma_vel_rotation", f.transition.sigma_vel[3]);
  t.set_number("transition.sigma_pose_translation", f.transition.sigma_pose[0]);
  t.set_number("transition.sigma_pose_rotation", f.transition.sigma_pose[3]);
  t.set_number("transition.accel_dt_power", f.transition.accel_dt_power);

  t.set_number("tracker.steps", f.tracker.steps);
  t.set_number("tracker.lr_translation", f.tracker.lr_translation);
  t.set_number("tracker.lr_rotation", f.tracker.lr_rotation);
  t.set_number("tracker.pixel_samples", f.tracker.pixel_samples);
  t.set_number("tracker.geo_outlier", f.tracker.geo_outlier);
  t.set_number("tracker.photo_outlier", f.tracker.photo_outlier);
  t.set_number("tracker.laplace_ema", f.tracker.laplace_ema);
  t.set_number("tracker.damping", f.tracker.damping);

  t.set_number("pipeline.render_period", f.render_period);
  t.set_bool("pipeline.use_frame_timestamps", f.use_frame_timestamps);

  const Vec3d& p0 = f.initial_state.mean_pose.translation;
  const Eigen::Quaterniond& q0 = f.initial_state.mean_pose.rotation;
  t.set_array("initial_state.position", {p0.x(), p0.y(), p0.z()});
  t.set_array("initial_state.quaternion", {q0.w(), q0.x(), q0.y(), q0.z()});
  const Vec6d v0 = f.initial_state.mean_velocity.vector();
  t.set_array("initial_state.velocity",
              {v0[0], v0[1], v0[2], v0[3], v0[4], v0[5]});

  t.set_text("synthetic.sequence", app.synthetic_sequence);
  t.set_number("synthetic.frames", app.synthetic_frames);
  t.set_number("synthetic.fps", app.synthetic_fps);
  t.set_number("synthetic.orbit_radius", app.synthetic_orbit_radius);
  t.set_number("synthetic.orbit_span_deg", app.synthetic_orbit_span_deg);
  t.set_number("synthetic.depth_noise", app.synthetic_depth_noise);
  t.set_number("synthetic.color_noise", app.synthetic_color_noise);
  t.set_text("synthetic.scene", app.synthetic_scene);
  t.set_number("synthetic.checker_scale", app.synthetic_checker_scale);
  if (!app.synthetic_boxes.empty()) t.set_array("synthetic.boxes", app.synthetic_boxes);
  if (!app.synthetic_spheres.empty())
    t.set_array("synthetic.spheres", app.synthetic_spheres);

  if (!app.tum_directory.empty()) t.set_text("tum.directory", app.tum_directory);
  t.set_number("tum.width_full", app.tum_full_intrinsics.width);
  t.set_number("tum.height_full", app.tum_full_intrinsics.height);
  t.set_number("tum.fx", app.tum_full_intrinsics.fx);
  t.set_number("tum.fy", app.tum_full_intrinsics.fy);
  t.set_number("tum.cx", app.tum_full_intrinsics.cx);
  t.set_number("tum.cy", app.tum_full_intrinsics.cy);
  return t;
}

namespace {

ScenePrimitive box(const Vec3d& center, const Vec3d& half, const Vec3f& albedo) {
  ScenePrimitive p;
  p.kind = ScenePrimitive::Kind::Box;
  p.center = center;
  p.half_extents = half;
  p.albedo = albedo;
  return p;
}

ScenePrimitive sphere(const Vec3d& center, double radius, const Vec3f& albedo) {
  ScenePrimitive p;
  p.kind = ScenePrimitive::Kind::Sphere;
  p.center = center;
  p.half_extents = Vec3d(radius, 0, 0);
  p.albedo = albedo;
  return p;
}

/// Walled 6 x 6 x 3 m room with distinctly colored walls, checker texture
/// and a few objects.
SyntheticScene room_scene() {
  SyntheticScene scene;
  scene.bounds_min = Vec3d(-3.5, -3.5, -2.0);
  scene.bounds_max = Vec3d(3.5, 3.5, 2.0);
  scene.checker_scale = 0.5;
  scene.primitives = {
      box({0, 0, -1.65}, {3.3, 3.3, 0.15}, {0.45f, 0.45f, 0.45f}),   // floor
      box({0, 0, 1.65}, {3.3, 3.3, 0.15}, {0.85f, 0.85f, 0.85f}),    // ceiling
      box({3.15, 0, 0}, {0.15, 3.3, 1.8}, {0.80f, 0.25f, 0.20f}),    // +x wall
      box({-3.15, 0, 0}, {0.15, 3.3, 1.8}, {0.20f, 0.70f, 0.30f}),   // -x wall
      box({0, 3.15, 0}, {3.3, 0.15, 1.8}, {0.25f, 0.35f, 0.85f}),    // +y wall
      box({0, -3.15, 0}, {3.3, 0.15, 1.8}, {0.85f, 0.75f, 0.20f}),   // -y wall
      box({1.8, 1.2, -1.1}, {0.45, 0.35, 0.40}, {0.70f, 0.50f, 0.80f}),
      box({-1.6, 1.7, -0.9}, {0.30, 0.30, 0.60}, {0.30f, 0.80f, 0.80f}),
      sphere({1.4, -1.7, -0.9}, 0.60, {0.90f, 0.40f, 0.60f}),
      sphere({-1.8, -1.2, -1.05}, 0.45, {0.50f, 0.90f, 0.40f}),
  };
  return scene;
}

/// Camera on a horizontal circle, optical axis pointing radially outward,
/// image y axis pointing down in the world.
Pose orbit_pose(double radius, double theta) {
  const Vec3d position(radius * std::cos(theta), radius * std::sin(theta), 0.0);
  Mat3d R;
  R.col(0) = Vec3d(std::sin(theta), -std::cos(theta), 0);  // camera x (right)
  R.col(1) = Vec3d(0, 0, -1);                              // camera y (down)
  R.col(2) = Vec3d(std::cos(theta), std::sin(theta), 0);   // camera z (forward)
  return Pose(position, Eigen::Quaterniond(R));
}

}  // namespace

SyntheticScene make_scene(const AppConfig& app) {
  SyntheticScene scene;
  if (app.synthetic_scene == "room") {
    scene = room_scene();
  } else if (app.synthetic_scene != "custom") {
    throw InvalidConfig("synthetic.scene must be 'room' or 'custom'");
  }
  if (app.synthetic_boxes.size() % 9 != 0) {
    throw InvalidConfig("synthetic.boxes needs 9 numbers per box");
  }
  for (size_t i = 0; i < app.synthetic_boxes.size(); i += 9) {
    const double* v = app.synthetic_boxes.data() + i;
    scene.primitives.push_back(box({v[0], v[1], v[2]}, {v[3], v[4], v[5]},
                                   {float(v[6]), float(v[7]), float(v[8])}));
  }
  if (app.synthetic_spheres.size() % 7 != 0) {
    throw InvalidConfig("synthetic.spheres needs 7 numbers per sphere");
  }
  for (size_t i = 0; i < app.synthetic_spheres.size(); i += 7) {
    const double* v = app.synthetic_spheres.data() + i;
    scene.primitives.push_back(
        sphere({v[0], v[1], v[2]}, v[3], {float(v[4]), float(v[5]), float(v[6])}));
  }
  if (scene.primitives.empty()) {
    throw InvalidConfig("synthetic scene has no primitives");
  }
  if (app.synthetic_checker_scale >= 0) {
    scene.checker_scale = app.synthetic_checker_scale;
  }
  if (app.synthetic_scene == "custom") {
    scene.bounds_min = Vec3d::Constant(std::numeric_limits<double>::infinity());
    scene.bounds_max = -scene.bounds_min;
    for (const auto& prim : scene.primitives) {
      const Vec3d half = prim.kind == ScenePrimitive::Kind::Sphere
                             ? Vec3d::Constant(prim.half_extents.x())
                             : prim.half_extents;
      scene.bounds_min = scene.bounds_min.cwiseMin(prim.center - half);
      scene.bounds_max = scene.bounds_max.cwiseMax(prim.center + half);
    }
  }
  return scene;
}

SyntheticSetup make_synthetic_setup(const AppConfig& app) {
  SyntheticSetup setup;
  setup.scene = make_scene(app);
  setup.sequence.camera = app.camera;
  setup.sequence.depth_noise = app.synthetic_depth_noise;
  setup.sequence.color_noise = app.synthetic_color_noise;
  setup.sequence.accel_dt_power = app.filter.transition.accel_dt_power;

  const int n = app.synthetic_frames;
  if (n < 1) throw InvalidConfig("synthetic.frames must be >= 1");
  const double dt = 1.0 / app.synthetic_fps;
  if (app.synthetic_sequence == "room_orbit") {
    // A short stationary warm-up before the sweep, like the platform hold at
    // the start of the UAV sequences: the map solidifies before motion.
    const double span = app.synthetic_orbit_span_deg * M_PI / 180.0;
    const int hold = std::min(n - 1, std::max(2, n / 10));
    for (int i = 0; i < n; ++i) {
      const double progress =
          i <= hold ? 0.0 : double(i - hold) / double(n - 1 - hold);
      setup.sequence.trajectory.emplace_back(
          i * dt, orbit_pose(app.synthetic_orbit_radius, span * progress));
    }
  } else if (app.synthetic_sequence == "static") {
    for (int i = 0; i < n; ++i) {
      setup.sequence.trajectory.emplace_back(
          i * dt, orbit_pose(app.synthetic_orbit_radius, 0.0));
    }
  } else {
    throw InvalidConfig("synthetic.sequence must be 'room_orbit' or 'static'");
  }
  return setup;
}

}  // namespace gvslam
