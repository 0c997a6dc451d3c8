#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "flymation/model.hpp"
#include "flymation/simplify.hpp"
#include "flymation/timeline.hpp"

namespace flymation {

struct Polyline {
  std::vector<Vec3> vertices;
  std::vector<Color> colors;  // one per vertex
  double width_px = 2.0;
};

struct GlyphInstance {
  GlyphKind kind = GlyphKind::cube;
  Mat4 transform = Mat4::identity();
  Color color;
  int trajectory = -1;  // index into the scene's trajectories, -1 for statics
};

/// Renderer-agnostic draw list.
struct RenderBatch {
  std::vector<Polyline> polylines;
  std::vector<GlyphInstance> glyphs;
  Color background{0.1, 0.1, 0.12, 1.0};
};

struct DecomposedTransform {
  Vec3 p;
  Quat q;
  Vec3 s;
};

/// Splits an affine T*R*S matrix back into translation, rotation and scale.
inline DecomposedTransform decompose_transform(const Mat4& m) {
  DecomposedTransform d;
  d.p = {m(0, 3), m(1, 3), m(2, 3)};
  const Vec3 c0{m(0, 0), m(1, 0), m(2, 0)};
  const Vec3 c1{m(0, 1), m(1, 1), m(2, 1)};
  const Vec3 c2{m(0, 2), m(1, 2), m(2, 2)};
  d.s = {norm(c0), norm(c1), norm(c2)};
  const Vec3 x = c0 / d.s.x, y = c1 / d.s.y, z = c2 / d.s.z;
  // Shepperd's method on the rotation block.
  const double trace = x.x + y.y + z.z;
  Quat q;
  if (trace > 0.0) {
    const double s = 2.0 * std::sqrt(trace + 1.0);
    q = {0.25 * s, (y.z - z.y) / s, (z.x - x.z) / s, (x.y - y.x) / s};
  } else if (x.x > y.y && x.x > z.z) {
    const double s = 2.0 * std::sqrt(1.0 + x.x - y.y - z.z);
    q = {(y.z - z.y) / s, 0.25 * s, (y.x + x.y) / s, (z.x + x.z) / s};
  } else if (y.y > z.z) {
    const double s = 2.0 * std::sqrt(1.0 + y.y - x.x - z.z);
    q = {(z.x - x.z) / s, (y.x + x.y) / s, 0.25 * s, (z.y + y.z) / s};
  } else {
    const double s = 2.0 * std::sqrt(1.0 + z.z - x.x - y.y);
    q = {(x.y - y.x) / s, (z.x + x.z) / s, (z.y + y.z) / s, 0.25 * s};
  }
  d.q = normalize_quaternion(q);
  return d;
}

namespace detail {

inline GlyphInstance static_glyph(const StaticObjectSpec& obj) {
  return {obj.obj, compose_trs(obj.p, obj.q, obj.s), obj.c, -1};
}

inline void append_statics(const Scene& scene, RenderBatch& batch) {
  for (const StaticObjectSpec& obj : scene.statics()) batch.glyphs.push_back(static_glyph(obj));
}

/// Full path of a trajectory, simplified with RDP and split into chunks small
/// enough for 16-bit index buffers.
inline void append_path(const Trajectory& traj, double epsilon, double alpha_scale, double width,
                        RenderBatch& batch) {
  const auto& samples = traj.samples;
  std::vector<std::size_t> kept;
  if (samples.size() >= 2 && epsilon > 0.0) {
    std::vector<Vec3> pts(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) pts[i] = samples[i].p;
    kept = rdp(pts, epsilon);
  } else {
    kept.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) kept[i] = i;
  }
  for (const auto& [lo, hi] : chunk(kept.size(), kDefaultChunkPoints)) {
    Polyline line;
    line.width_px = width;
    line.vertices.reserve(hi - lo + 1);
    line.colors.reserve(hi - lo + 1);
    for (std::size_t k = lo; k <= hi; ++k) {
      const StateSample& s = samples[kept[k]];
      Color c = traj.color_override.value_or(s.c);
      c.a *= alpha_scale;
      line.vertices.push_back(s.p);
      line.colors.push_back(c);
    }
    batch.polylines.push_back(std::move(line));
  }
}

}  // namespace detail

/// Snapshot as one continuous line per trajectory plus static objects.
/// epsilon 0 keeps every sample.
inline RenderBatch compile_snapshot_line(const Scene& scene, double lod_epsilon) {
  RenderBatch batch;
  batch.background = scene.config().background;
  detail::append_statics(scene, batch);
  for (const Trajectory& traj : scene.trajectories())
    detail::append_path(traj, lod_epsilon, 1.0, scene.config().line_width_px, batch);
  return batch;
}

inline RenderBatch compile_snapshot_line(const Scene& scene) {
  return compile_snapshot_line(scene, scene.config().lod_epsilon_m);
}

inline constexpr double kTimelapsePathAlpha = 0.25;

/// Snapshot as a sequence of glyphs at evenly spaced instants over the scene
/// range, with a faint full path behind them.
inline RenderBatch compile_snapshot_timelapse(const Scene& scene,
                                              std::optional<double> interval = std::nullopt) {
  const std::vector<double> instants = timelapse_instants(scene.t_range(), interval);
  RenderBatch batch;
  batch.background = scene.config().background;
  detail::append_statics(scene, batch);
  const auto& trajectories = scene.trajectories();
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const Trajectory& traj = trajectories[i];
    detail::append_path(traj, scene.config().lod_epsilon_m, kTimelapsePathAlpha,
                        scene.config().line_width_px, batch);
    for (double t : instants) {
      const PoseSample pose = sample_trajectory(traj, t);
      if (!pose.visible) continue;
      batch.glyphs.push_back({traj.glyph, compose_trs(pose.p, pose.q, pose.s),
                              traj.color_override.value_or(pose.c), static_cast<int>(i)});
    }
  }
  return batch;
}

/// One animation frame: a glyph per visible trajectory and a trail over
/// [t - duration, t] fading from transparent (oldest) to opaque (head).
inline RenderBatch compile_animation_frame(const Scene& scene, double t, const TrailConfig& trail) {
  if (!scene.t_range().contains(t))
    throw ValidationError("animation time " + std::to_string(t) + " outside scene range [" +
                          std::to_string(scene.t_range().t0) + ", " +
                          std::to_string(scene.t_range().t1) + "]");
  RenderBatch batch;
  batch.background = scene.config().background;
  detail::append_statics(scene, batch);
  const auto& trajectories = scene.trajectories();
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const Trajectory& traj = trajectories[i];
    const PoseSample pose = sample_trajectory(traj, t);
    if (!pose.visible) continue;
    batch.glyphs.push_back({traj.glyph, compose_trs(pose.p, pose.q, pose.s),
                            traj.color_override.value_or(pose.c), static_cast<int>(i)});
    if (!(trail.duration_s > 0.0)) continue;

    // Raw samples with t_k in [t - d, t), then the interpolated head at t.
    const double start = t - trail.duration_s;
    const auto& samples = traj.samples;
    auto first = std::lower_bound(samples.begin(), samples.end(), start,
                                  [](const StateSample& s, double v) { return s.t < v; });
    std::vector<std::pair<double, Vec3>> points;
    for (auto it = first; it != samples.end() && it->t < t; ++it) points.emplace_back(it->t, it->p);
    points.emplace_back(t, pose.p);
    if (points.size() < 2) continue;

    Polyline line;
    line.width_px = scene.config().line_width_px;
    const double oldest = points.front().first;
    const double span = t - oldest;
    for (const auto& [tk, p] : points) {
      Color c = trail.color;
      c.a *= span > 0.0 ? (tk - oldest) / span : 1.0;
      line.vertices.push_back(p);
      line.colors.push_back(c);
    }
    batch.polylines.push_back(std::move(line));
  }
  return batch;
}

}  // namespace flymation
