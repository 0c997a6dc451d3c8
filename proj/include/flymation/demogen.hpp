#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "flymation/error.hpp"
#include "flymation/ingest.hpp"
#include "flymation/io.hpp"
#include "flymation/model.hpp"

namespace flymation {

struct LorenzParams {
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
  double dt = 0.01;
  double duration = 10.0;
};

/// Right-hand side of the Lorenz system.
constexpr Vec3 lorenz_derivative(Vec3 s, const LorenzParams& p) {
  return {p.sigma * (s.y - s.x), s.x * (p.rho - s.z) - s.y, s.x * s.y - p.beta * s.z};
}

/// One classical fourth-order Runge-Kutta step.
constexpr Vec3 rk4_step(Vec3 s, const LorenzParams& p, double dt) {
  const Vec3 k1 = lorenz_derivative(s, p);
  const Vec3 k2 = lorenz_derivative(s + k1 * (0.5 * dt), p);
  const Vec3 k3 = lorenz_derivative(s + k2 * (0.5 * dt), p);
  const Vec3 k4 = lorenz_derivative(s + k3 * dt, p);
  return s + (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (dt / 6.0);
}

/// Fixed eight-color palette, cycled per generated trajectory.
inline constexpr std::array<Color, 8> kDemoPalette{{{0.894, 0.102, 0.110, 1.0},
                                                    {0.216, 0.494, 0.722, 1.0},
                                                    {0.302, 0.686, 0.290, 1.0},
                                                    {0.596, 0.306, 0.639, 1.0},
                                                    {1.000, 0.498, 0.000, 1.0},
                                                    {1.000, 1.000, 0.200, 1.0},
                                                    {0.651, 0.337, 0.157, 1.0},
                                                    {0.969, 0.506, 0.749, 1.0}}};

inline constexpr std::array<GlyphKind, 4> kLorenzGlyphs{GlyphKind::sphere, GlyphKind::cube,
                                                        GlyphKind::cylinder, GlyphKind::cone};

/// Attitude whose body X axis points along v (yaw, then pitch). Identity for v = 0.
inline Quat heading_quaternion(Vec3 v) {
  const double horizontal = std::hypot(v.x, v.y);
  if (horizontal == 0.0 && v.z == 0.0) return Quat::identity();
  return quat_from_yaw_pitch(std::atan2(v.y, v.x), -std::atan2(v.z, horizontal));
}

namespace detail {

// Uniform double in [0,1) from the top 53 bits; identical on every platform,
// unlike std::uniform_real_distribution.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::string padded_index(std::size_t i, std::size_t count) {
  std::size_t width = 2;
  for (std::size_t n = count; n >= 100; n /= 10) ++width;
  std::string s = std::to_string(i);
  return std::string(width > s.size() ? width - s.size() : 0, '0') + s;
}

struct DemoLayout {
  std::filesystem::path root;
  std::filesystem::path vehicles, dynamic, statics;
};

inline DemoLayout make_layout(const std::filesystem::path& root) {
  DemoLayout d{root, root / "vehicles", root / "dynamic", root / "static"};
  ensure_directory(d.vehicles);
  ensure_directory(d.dynamic);
  ensure_directory(d.statics);
  return d;
}

inline std::filesystem::path write_config(const DemoLayout& d, SceneConfig cfg) {
  cfg.vehicle_dir = "vehicles";
  cfg.dynamic_dir = "dynamic";
  cfg.static_dir = "static";
  const auto path = d.root / "scene.json";
  write_text_file(path, scene_config_json(cfg).dump(2) + "\n");
  return path;
}

}  // namespace detail

/// Lorenz trajectory from x0: one row per step k with t = k*dt, inclusive of
/// the final instant.
inline std::vector<StateSample> lorenz_samples(Vec3 x0, const LorenzParams& params, Color color, Vec3 scale) {
  const auto steps = static_cast<std::size_t>(std::llround(params.duration / params.dt));
  std::vector<StateSample> out;
  out.reserve(steps + 1);
  Vec3 state = x0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const Vec3 v = lorenz_derivative(state, params);
    out.push_back({static_cast<double>(k) * params.dt, state, heading_quaternion(v), v, color, scale});
    state = rk4_step(state, params, params.dt);
  }
  return out;
}

/// Writes n_traj Lorenz vehicle CSVs starting near (1,1,1) with seeded
/// perturbations in [-0.1, 0.1]^3, plus scene.json and README.md.
/// Returns the scene.json path.
inline std::filesystem::path gen_lorenz_scene(std::size_t n_traj, const LorenzParams& params,
                                              const std::filesystem::path& out_dir, std::uint64_t seed) {
  if (n_traj < 1) throw ValidationError("lorenz demo needs at least one trajectory");
  if (!(params.dt > 0.0) || !(params.duration > 0.0) || params.dt > params.duration)
    throw ValidationError("lorenz demo needs 0 < dt <= duration");
  const auto layout = detail::make_layout(out_dir);
  std::mt19937_64 rng(seed);
  SceneConfig cfg;
  cfg.snapshot_style = SnapshotStyle::line;
  for (std::size_t i = 0; i < n_traj; ++i) {
    Vec3 x0{1.0, 1.0, 1.0};
    x0.x += 0.2 * detail::unit_uniform(rng) - 0.1;
    x0.y += 0.2 * detail::unit_uniform(rng) - 0.1;
    x0.z += 0.2 * detail::unit_uniform(rng) - 0.1;
    const std::string id = "lorenz_" + detail::padded_index(i, n_traj);
    const Color color = kDemoPalette[i % kDemoPalette.size()];
    const auto samples = lorenz_samples(x0, params, color, {0.2, 0.2, 0.2});
    write_text_file(layout.vehicles / (id + ".csv"), write_state_csv(samples));
    cfg.colors[id] = color;
    cfg.glyphs[id] = kLorenzGlyphs[i % kLorenzGlyphs.size()];
  }
  const auto config_path = detail::write_config(layout, cfg);

  std::ostringstream readme;
  readme.precision(17);
  readme << "# Lorenz attractor demo\n\n"
         << "Generated by `flymation demo lorenz`.\n\n"
         << "- system: dx/dt = sigma (y - x), dy/dt = x (rho - z) - y, dz/dt = x y - beta z\n"
         << "- sigma = " << params.sigma << ", rho = " << params.rho << ", beta = " << params.beta << "\n"
         << "- integrator: classical RK4, dt = " << params.dt << " s, duration = " << params.duration << " s\n"
         << "- trajectories: " << n_traj << ", initial states (1,1,1) + uniform [-0.1, 0.1]^3, seed = "
         << seed << " (mt19937_64)\n"
         << "- velocity column: the Lorenz derivative; attitude: body X along velocity\n"
         << "- glyphs cycle sphere, cube, cylinder, cone; colors cycle an 8-color palette\n";
  write_text_file(layout.root / "README.md", readme.str());
  return config_path;
}

struct RacetrackParams {
  double radius = 15.0;     // m
  double speed = 5.0;       // m/s, horizontal
  double height = 2.0;      // m, gate center altitude
  double wobble = 0.5;      // m, altitude swing between gates
  double sample_dt = 0.05;  // s, target spacing (rounded so gates fall on knots)
};

/// Gate centers and passage times on the circular track.
struct RacetrackGeometry {
  std::vector<StaticObjectSpec> gates;
  std::vector<StateSample> samples;
  std::vector<double> passage_times;  // first lap
};

inline RacetrackGeometry racetrack_geometry(std::size_t n_gates, std::size_t laps,
                                            const RacetrackParams& rp = {}) {
  if (n_gates < 2) throw ValidationError("racetrack needs at least 2 gates");
  if (laps < 1) throw ValidationError("racetrack needs at least 1 lap");
  RacetrackGeometry g;
  const double n = static_cast<double>(n_gates);
  const double omega = rp.speed / rp.radius;
  const double period = 2.0 * kPi / omega;
  const auto per_gate = static_cast<std::size_t>(std::max(1.0, std::round(period / n / rp.sample_dt)));
  const std::size_t per_lap = n_gates * per_gate;

  for (std::size_t j = 0; j < n_gates; ++j) {
    const double theta = 2.0 * kPi * (static_cast<double>(j) / n);
    StaticObjectSpec gate;
    gate.p = {rp.radius * std::cos(theta), rp.radius * std::sin(theta), rp.height};
    gate.q = quat_from_yaw_pitch(theta + 0.5 * kPi, 0.0);
    gate.c = {1.0, 0.45, 0.1, 1.0};
    gate.s = {0.3, 3.0, 3.0};
    gate.obj = GlyphKind::gate;
    g.gates.push_back(gate);
    g.passage_times.push_back(theta / omega);
  }

  const std::size_t total = per_lap * laps;
  g.samples.reserve(total + 1);
  for (std::size_t k = 0; k <= total; ++k) {
    // theta is taken mod one lap so gate knots reproduce the gate formula exactly.
    const double theta = 2.0 * kPi * (static_cast<double>(k % per_lap) / static_cast<double>(per_lap));
    const double lap_theta = 2.0 * kPi * (static_cast<double>(k) / static_cast<double>(per_lap));
    StateSample s;
    s.t = lap_theta / omega;
    s.p = {rp.radius * std::cos(theta), rp.radius * std::sin(theta), rp.height + rp.wobble * std::sin(n * theta)};
    s.v = omega * Vec3{-rp.radius * std::sin(theta), rp.radius * std::cos(theta),
                       rp.wobble * n * std::cos(n * theta)};
    s.q = heading_quaternion(s.v);
    s.c = {0.2, 0.6, 1.0, 1.0};
    s.s = {0.8, 0.8, 0.8};
    g.samples.push_back(s);
  }
  return g;
}

/// Writes gate statics and one vehicle circling through every gate, plus
/// scene.json (follow camera on the vehicle) and README.md.
inline std::filesystem::path gen_racetrack_scene(std::size_t n_gates, std::size_t laps,
                                                 const std::filesystem::path& out_dir,
                                                 const RacetrackParams& rp = {}) {
  const RacetrackGeometry g = racetrack_geometry(n_gates, laps, rp);
  const auto layout = detail::make_layout(out_dir);
  write_text_file(layout.vehicles / "racer.csv", write_state_csv(g.samples));
  write_text_file(layout.statics / "gates.csv", write_static_csv(g.gates));
  SceneConfig cfg;
  cfg.camera = CameraMode::follow;
  cfg.follow_target = "racer";
  const auto config_path = detail::write_config(layout, cfg);

  std::ostringstream readme;
  readme.precision(17);
  readme << "# Race track demo\n\n"
         << "Generated by `flymation demo racetrack`.\n\n"
         << "- gates: " << n_gates << " on a horizontal circle of radius " << rp.radius << " m at z = "
         << rp.height << " m, oriented along the tangent\n"
         << "- vehicle: `racer`, " << laps << " lap(s) at " << rp.speed
         << " m/s horizontal speed, altitude swing " << rp.wobble << " m between gates\n"
         << "- every gate passage is a sample knot, so the vehicle sits exactly at each gate center\n";
  write_text_file(layout.root / "README.md", readme.str());
  return config_path;
}

}  // namespace flymation
