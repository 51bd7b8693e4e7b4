#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gvslam/pipeline.hpp"
#include "gvslam/worlds.hpp"

namespace gvslam {

/// Key/value tree parsed from a documented TOML subset: [section] headers,
/// key = value with numbers, "strings", booleans and [number arrays],
/// # comments. Keys are addressed as "section.key".
class ConfigTree {
 public:
  static ConfigTree parse_file(const std::string& path);
  static ConfigTree parse_string(const std::string& text, const std::string& name);

  bool has(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  double number(const std::string& key) const;  // required
  std::string text(const std::string& key, const std::string& fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::vector<double> array(const std::string& key,
                            const std::vector<double>& fallback) const;

  void set_number(const std::string& key, double v);
  void set_text(const std::string& key, const std::string& v);
  void set_bool(const std::string& key, bool v);
  void set_array(const std::string& key, const std::vector<double>& v);

  /// Round-trippable text form, grouped by section.
  std::string serialize() const;

 private:
  struct Value {
    enum class Kind { Number, Text, Bool, Array } kind = Kind::Number;
    double num = 0.0;
    std::string str;
    bool flag = false;
    std::vector<double> arr;
  };
  std::map<std::string, Value> values_;
  std::string name_ = "<config>";
};

/// Synthetic-input description assembled from the [synthetic] section.
struct SyntheticSetup {
  SyntheticScene scene;
  SequenceSpec sequence;
};

/// Everything a CLI run needs: filter config plus input descriptions.
struct AppConfig {
  std::string profile = "synthetic";  // euroc | tum | blackbird | synthetic
  FilterConfig filter;
  CameraIntrinsics camera;
  int threads = 0;

  // [synthetic]
  std::string synthetic_sequence = "room_orbit";
  int synthetic_frames = 100;
  double synthetic_fps = 10.0;
  double synthetic_orbit_radius = 1.0;
  double synthetic_orbit_span_deg = 120.0;
  double synthetic_depth_noise = 0.0;
  double synthetic_color_noise = 0.0;
  std::string synthetic_scene = "room";
  double synthetic_checker_scale = -1.0;  // < 0: scene default
  std::vector<double> synthetic_boxes;    // 9 per box: center, half, albedo
  std::vector<double> synthetic_spheres;  // 7 per sphere: center, radius, albedo

  // [tum]
  std::string tum_directory;
  CameraIntrinsics tum_full_intrinsics;
};

/// Applies the per-profile defaults, then the explicit keys of the tree.
AppConfig build_app_config(const ConfigTree& tree);
AppConfig load_app_config(const std::string& path);

/// Effective config after defaults, re-loadable via --config.
ConfigTree effective_config(const AppConfig& config);

/// The built-in walled room plus interior objects, or the primitives
/// declared in the config arrays.
SyntheticScene make_scene(const AppConfig& config);

/// The named trajectory ("room_orbit" or "static") over the scene.
SyntheticSetup make_synthetic_setup(const AppConfig& config);

}  // namespace gvslam
