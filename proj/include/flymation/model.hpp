#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flymation/error.hpp"
#include "flymation/math.hpp"

namespace flymation {

enum class GlyphKind { sphere, cube, cylinder, cone, gate, quadrotor };

inline constexpr std::array<GlyphKind, 6> kAllGlyphKinds{GlyphKind::sphere,   GlyphKind::cube,
                                                         GlyphKind::cylinder, GlyphKind::cone,
                                                         GlyphKind::gate,     GlyphKind::quadrotor};

constexpr std::string_view glyph_name(GlyphKind kind) {
  switch (kind) {
    case GlyphKind::sphere: return "sphere";
    case GlyphKind::cube: return "cube";
    case GlyphKind::cylinder: return "cylinder";
    case GlyphKind::cone: return "cone";
    case GlyphKind::gate: return "gate";
    case GlyphKind::quadrotor: return "quadrotor";
  }
  return "unknown";
}

/// "{sphere, cube, cylinder, cone, gate, quadrotor}"
inline std::string glyph_name_list() {
  std::string out = "{";
  for (std::size_t i = 0; i < kAllGlyphKinds.size(); ++i) {
    if (i != 0) out += ", ";
    out += glyph_name(kAllGlyphKinds[i]);
  }
  return out + "}";
}

/// Case-insensitive lookup; nullopt for names outside the closed set.
inline std::optional<GlyphKind> parse_glyph_kind(std::string_view name) {
  for (GlyphKind kind : kAllGlyphKinds) {
    const std::string_view ref = glyph_name(kind);
    if (ref.size() != name.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < ref.size() && same; ++i) {
      char c = name[i];
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      same = c == ref[i];
    }
    if (same) return kind;
  }
  return std::nullopt;
}

/// One timestamped rigid-body state.
struct StateSample {
  double t = 0.0;
  Vec3 p;
  Quat q;
  Vec3 v;
  Color c;
  Vec3 s{1.0, 1.0, 1.0};

  friend bool operator==(const StateSample&, const StateSample&) = default;
};

struct StaticObjectSpec {
  Vec3 p;
  Quat q;
  Color c;
  Vec3 s{1.0, 1.0, 1.0};
  GlyphKind obj = GlyphKind::cube;

  friend bool operator==(const StaticObjectSpec&, const StaticObjectSpec&) = default;
};

enum class TrajectoryKind { vehicle, dynamic };

constexpr std::string_view kind_name(TrajectoryKind k) {
  return k == TrajectoryKind::vehicle ? "vehicle" : "dynamic";
}

struct Trajectory {
  std::string id;
  TrajectoryKind kind = TrajectoryKind::vehicle;
  GlyphKind glyph = GlyphKind::quadrotor;
  std::optional<Color> color_override;
  std::vector<StateSample> samples;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

enum class SnapshotStyle { line, timelapse };
enum class CameraMode { orbit, follow };

struct TrailConfig {
  double duration_s = 1.0;
  Color color{1.0, 0.0, 0.0, 1.0};

  friend bool operator==(const TrailConfig&, const TrailConfig&) = default;
};

struct SceneConfig {
  std::string vehicle_dir;
  std::string dynamic_dir;
  std::string static_dir;
  std::map<std::string, Color> colors;
  std::map<std::string, GlyphKind> glyphs;
  SnapshotStyle snapshot_style = SnapshotStyle::line;
  CameraMode camera = CameraMode::orbit;
  std::optional<std::string> follow_target;
  TrailConfig trail;
  std::optional<double> timelapse_interval_s;
  double lod_epsilon_m = 0.0;
  double line_width_px = 2.0;
  Color background{0.1, 0.1, 0.12, 1.0};

  friend bool operator==(const SceneConfig&, const SceneConfig&) = default;
};

// --- validation ------------------------------------------------------------

inline std::string describe(Quat q) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << q.w << ", " << q.x << ", " << q.y << ", " << q.z << ")";
  return os.str();
}

/// Scales q to unit norm. The sign is kept as given.
inline Quat normalize_quaternion(Quat q) {
  if (!is_finite(q)) throw ValidationError("non-finite quaternion " + describe(q));
  const double n = norm(q);
  if (!(n > 1e-12)) throw ValidationError("quaternion norm below 1e-12: " + describe(q));
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

namespace detail {

inline bool is_unit(Quat q) { return std::abs(norm(q) - 1.0) <= 1e-9; }

inline bool positive_scale(Vec3 s) { return s.x > 0.0 && s.y > 0.0 && s.z > 0.0; }

inline void validate_pose_fields(Vec3 p, Quat q, Color c, Vec3 s, const std::string& where) {
  if (!is_finite(p)) throw ValidationError(where + ": non-finite position");
  if (!is_finite(q) || !is_unit(q)) throw ValidationError(where + ": quaternion is not unit");
  if (!is_finite(c) || !in_unit_range(c))
    throw ValidationError(where + ": color component outside [0,1]");
  if (!is_finite(s) || !positive_scale(s)) throw ValidationError(where + ": scale must be > 0");
}

}  // namespace detail

inline void validate_trajectory(const Trajectory& traj) {
  if (traj.id.empty()) throw ValidationError("trajectory with empty id");
  if (traj.samples.empty()) throw ValidationError("trajectory '" + traj.id + "' has no samples");
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const StateSample& s = traj.samples[i];
    const std::string where = "trajectory '" + traj.id + "' sample " + std::to_string(i);
    if (!std::isfinite(s.t)) throw ValidationError(where + ": non-finite time");
    if (i > 0 && !(s.t > traj.samples[i - 1].t))
      throw ValidationError(where + ": non-increasing time");
    if (!is_finite(s.v)) throw ValidationError(where + ": non-finite velocity");
    detail::validate_pose_fields(s.p, s.q, s.c, s.s, where);
  }
  if (traj.color_override && !in_unit_range(*traj.color_override))
    throw ValidationError("trajectory '" + traj.id + "': override color outside [0,1]");
}

inline void validate_static(const StaticObjectSpec& obj, std::size_t index) {
  detail::validate_pose_fields(obj.p, obj.q, obj.c, obj.s, "static " + std::to_string(index));
}

inline void validate_config(const SceneConfig& cfg) {
  if (!(cfg.trail.duration_s >= 0.0) || !std::isfinite(cfg.trail.duration_s))
    throw ValidationError("trail.duration_s must be >= 0");
  if (cfg.timelapse_interval_s &&
      (!(*cfg.timelapse_interval_s > 0.0) || !std::isfinite(*cfg.timelapse_interval_s)))
    throw ValidationError("timelapse_interval_s must be > 0");
  if (!(cfg.lod_epsilon_m >= 0.0) || !std::isfinite(cfg.lod_epsilon_m))
    throw ValidationError("lod_epsilon_m must be >= 0");
  if (!(cfg.line_width_px > 0.0) || !std::isfinite(cfg.line_width_px))
    throw ValidationError("line_width_px must be > 0");
  auto check_color = [](Color c, const std::string& what) {
    if (!is_finite(c) || !in_unit_range(c))
      throw ValidationError(what + ": color component outside [0,1]");
  };
  check_color(cfg.trail.color, "trail.color");
  check_color(cfg.background, "background");
  for (const auto& [id, c] : cfg.colors) check_color(c, "colors." + id);
}

// --- scene-level derived quantities ----------------------------------------

struct TimeRange {
  double t0 = 0.0;
  double t1 = 0.0;

  double length() const { return t1 - t0; }
  bool contains(double t) const { return t >= t0 && t <= t1; }

  friend bool operator==(const TimeRange&, const TimeRange&) = default;
};

/// [min first time, max last time]. Statics-only input gives [0,0].
inline TimeRange scene_time_range(std::span<const Trajectory> trajectories,
                                  std::size_t static_count) {
  if (trajectories.empty()) {
    if (static_count == 0) throw ValidationError("scene is empty");
    return {0.0, 0.0};
  }
  TimeRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const Trajectory& traj : trajectories) {
    if (traj.samples.empty()) throw ValidationError("trajectory '" + traj.id + "' has no samples");
    r.t0 = std::min(r.t0, traj.samples.front().t);
    r.t1 = std::max(r.t1, traj.samples.back().t);
  }
  return r;
}

/// Minimal box around every sample position and static position.
inline Aabb scene_bbox(std::span<const Trajectory> trajectories,
                       std::span<const StaticObjectSpec> statics) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Aabb box{{inf, inf, inf}, {-inf, -inf, -inf}};
  bool any = false;
  auto grow = [&](Vec3 p) {
    box.min = {std::min(box.min.x, p.x), std::min(box.min.y, p.y), std::min(box.min.z, p.z)};
    box.max = {std::max(box.max.x, p.x), std::max(box.max.y, p.y), std::max(box.max.z, p.z)};
    any = true;
  };
  for (const Trajectory& traj : trajectories)
    for (const StateSample& s : traj.samples) grow(s.p);
  for (const StaticObjectSpec& obj : statics) grow(obj.p);
  if (!any) throw ValidationError("scene is empty");
  return box;
}

/// Immutable validated scene. Safe to share across threads once built.
class Scene {
 public:
  /// Validates every element and derives the time range and bounding box.
  static Scene build(std::vector<Trajectory> trajectories, std::vector<StaticObjectSpec> statics,
                     SceneConfig config) {
    if (trajectories.empty() && statics.empty()) throw ValidationError("scene is empty");
    validate_config(config);
    std::set<std::string> ids;
    for (const Trajectory& traj : trajectories) {
      validate_trajectory(traj);
      if (!ids.insert(traj.id).second)
        throw ValidationError("duplicate trajectory id '" + traj.id + "'");
    }
    for (std::size_t i = 0; i < statics.size(); ++i) validate_static(statics[i], i);
    for (const auto& [id, c] : config.colors) {
      (void)c;
      if (!ids.count(id)) throw ValidationError("colors references unknown trajectory '" + id + "'");
    }
    for (const auto& [id, g] : config.glyphs) {
      (void)g;
      if (!ids.count(id)) throw ValidationError("glyphs references unknown trajectory '" + id + "'");
    }
    if (config.follow_target && !ids.count(*config.follow_target))
      throw ValidationError("follow_target references unknown trajectory '" +
                            *config.follow_target + "'");

    Scene scene;
    scene.t_range_ = scene_time_range(trajectories, statics.size());
    scene.bbox_ = scene_bbox(trajectories, statics);
    scene.trajectories_ = std::move(trajectories);
    scene.statics_ = std::move(statics);
    scene.config_ = std::move(config);
    return scene;
  }

  const std::vector<Trajectory>& trajectories() const noexcept { return trajectories_; }
  const std::vector<StaticObjectSpec>& statics() const noexcept { return statics_; }
  const SceneConfig& config() const noexcept { return config_; }
  TimeRange t_range() const noexcept { return t_range_; }
  const Aabb& bbox() const noexcept { return bbox_; }

  const Trajectory* find(std::string_view id) const {
    for (const Trajectory& traj : trajectories_)
      if (traj.id == id) return &traj;
    return nullptr;
  }

  std::size_t sample_count() const {
    std::size_t n = 0;
    for (const Trajectory& traj : trajectories_) n += traj.samples.size();
    return n;
  }

 private:
  Scene() = default;

  std::vector<Trajectory> trajectories_;
  std::vector<StaticObjectSpec> statics_;
  SceneConfig config_;
  TimeRange t_range_;
  Aabb bbox_;
};

inline TimeRange scene_time_range(const Scene& scene) {
  return scene_time_range(scene.trajectories(), scene.statics().size());
}

inline Aabb scene_bbox(const Scene& scene) {
  return scene_bbox(scene.trajectories(), scene.statics());
}

}  // namespace flymation
