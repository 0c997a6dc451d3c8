#pragma once

#include <algorithm>
#include <cmath>
#include <tuple>

#include "flymation/error.hpp"
#include "flymation/math.hpp"
#include "flymation/timeline.hpp"

namespace flymation {

struct CameraMatrices {
  Mat4 view = Mat4::identity();
  Mat4 proj = Mat4::identity();
  int width = 1;
  int height = 1;
};

/// Right-handed view matrix; the camera looks down its own -Z axis.
inline Mat4 look_at(Vec3 eye, Vec3 target, Vec3 up_hint) {
  const Vec3 dir = target - eye;
  const double len = norm(dir);
  if (!(len > 0.0)) throw ValidationError("look_at: eye and target coincide");
  const Vec3 f = dir / len;
  Vec3 up = up_hint;
  const double up_len = norm(up);
  if (!(up_len > 0.0) || std::abs(dot(f, up / up_len)) > 1.0 - 1e-6) up = {1.0, 0.0, 0.0};
  if (std::abs(dot(f, normalized(up))) > 1.0 - 1e-6) up = {0.0, 1.0, 0.0};
  const Vec3 s = normalized(cross(f, up));
  const Vec3 u = cross(s, f);

  Mat4 v = Mat4::identity();
  v(0, 0) = s.x;  v(0, 1) = s.y;  v(0, 2) = s.z;  v(0, 3) = -dot(s, eye);
  v(1, 0) = u.x;  v(1, 1) = u.y;  v(1, 2) = u.z;  v(1, 3) = -dot(u, eye);
  v(2, 0) = -f.x; v(2, 1) = -f.y; v(2, 2) = -f.z; v(2, 3) = dot(f, eye);
  return v;
}

/// OpenGL-style perspective: NDC depth -1 at near, +1 at far.
inline Mat4 perspective(double fov_y, double aspect, double near_plane, double far_plane) {
  if (!(fov_y > 0.0 && fov_y < kPi)) throw ValidationError("perspective: fov_y must be in (0, pi)");
  if (!(aspect > 0.0) || !std::isfinite(aspect)) throw ValidationError("perspective: aspect must be > 0");
  if (!(near_plane > 0.0)) throw ValidationError("perspective: near must be > 0");
  if (!(far_plane > near_plane)) throw ValidationError("perspective: far must exceed near");
  const double f = 1.0 / std::tan(0.5 * fov_y);
  Mat4 p;
  p(0, 0) = f / aspect;
  p(1, 1) = f;
  p(2, 2) = (far_plane + near_plane) / (near_plane - far_plane);
  p(2, 3) = 2.0 * far_plane * near_plane / (near_plane - far_plane);
  p(3, 2) = -1.0;
  return p;
}

struct Projection {
  double x = 0.0;  // pixels, origin top-left
  double y = 0.0;
  double depth = 0.0;  // NDC z
  bool in_front = false;
};

inline Projection project(Vec3 world, const CameraMatrices& cam) {
  const Vec4 eye = cam.view * Vec4{world.x, world.y, world.z, 1.0};
  const Vec4 clip = cam.proj * eye;
  Projection out;
  out.in_front = eye.z < 0.0 && clip.w > 0.0;
  if (clip.w == 0.0) return out;
  const double nx = clip.x / clip.w;
  const double ny = clip.y / clip.w;
  out.depth = clip.z / clip.w;
  out.x = (nx + 1.0) * 0.5 * cam.width;
  out.y = (1.0 - ny) * 0.5 * cam.height;
  return out;
}

// --- orbit camera ----------------------------------------------------------------

inline constexpr double kOrbitRotatePerPixel = 0.005;
inline constexpr double kOrbitZoomPerStep = 0.9;
inline constexpr double kOrbitMinRadius = 0.01;
inline constexpr double kOrbitMaxRadius = 1e6;
inline const double kOrbitMaxElevation = deg_to_rad(89.0);

struct OrbitState {
  Vec3 pivot;
  double radius = 10.0;
  double azimuth = 0.0;
  double elevation = 0.0;
};

inline OrbitState orbit_update(OrbitState state, double drag_dx, double drag_dy, int wheel_steps) {
  state.azimuth = std::remainder(state.azimuth + drag_dx * kOrbitRotatePerPixel, 2.0 * kPi);
  state.elevation = std::clamp(state.elevation - drag_dy * kOrbitRotatePerPixel,
                               -kOrbitMaxElevation, kOrbitMaxElevation);
  if (wheel_steps != 0) state.radius *= std::pow(kOrbitZoomPerStep, wheel_steps);
  state.radius = std::clamp(state.radius, kOrbitMinRadius, kOrbitMaxRadius);
  return state;
}

inline Vec3 orbit_eye(const OrbitState& s) {
  const double ce = std::cos(s.elevation);
  return s.pivot + s.radius * Vec3{ce * std::cos(s.azimuth), ce * std::sin(s.azimuth),
                                   std::sin(s.elevation)};
}

/// Auto-framing: pivot at the box center, radius 1.8x the half-diagonal,
/// azimuth 45 deg, elevation 30 deg.
inline OrbitState frame_bbox(const Aabb& box) {
  OrbitState s;
  s.pivot = box.center();
  const double half_diag = 0.5 * norm(box.extent());
  s.radius = std::clamp(half_diag > 0.0 ? 1.8 * half_diag : 1.0, kOrbitMinRadius, kOrbitMaxRadius);
  s.azimuth = deg_to_rad(45.0);
  s.elevation = deg_to_rad(30.0);
  return s;
}

inline constexpr double kDefaultFovY = 0.7853981633974483;  // 45 deg

/// Matrices for an orbit camera; clip planes scale with the radius.
inline CameraMatrices orbit_camera(const OrbitState& s, int width, int height,
                                   double fov_y = kDefaultFovY) {
  CameraMatrices cam;
  cam.width = width;
  cam.height = height;
  cam.view = look_at(orbit_eye(s), s.pivot, {0.0, 0.0, 1.0});
  cam.proj = perspective(fov_y, static_cast<double>(width) / height, s.radius * 1e-3,
                         s.radius * 10.0);
  return cam;
}

// --- third-person follow camera ---------------------------------------------------------

struct FollowState {
  double offset_back = 5.0;
  double offset_up = 2.0;
  double smoothing_tau = 0.3;
  Vec3 eye_smoothed;
  Vec3 target_smoothed;
  bool primed = false;  // false until the first update snaps onto the vehicle
};

struct FollowResult {
  FollowState state;
  Vec3 eye;
  Vec3 target;
};

/// Horizontal velocity direction, or body yaw when slower than 0.1 m/s.
inline Vec3 follow_heading(const PoseSample& vehicle) {
  const double vxy = std::hypot(vehicle.v.x, vehicle.v.y);
  if (vxy > 0.1) return {vehicle.v.x / vxy, vehicle.v.y / vxy, 0.0};
  const double yaw = yaw_of(vehicle.q);
  return {std::cos(yaw), std::sin(yaw), 0.0};
}

inline FollowResult follow_pose(FollowState state, const PoseSample& vehicle, double dt) {
  if (!vehicle.visible) throw ValidationError("follow camera target is not visible");
  const Vec3 heading = follow_heading(vehicle);
  const Vec3 desired_eye = vehicle.p - heading * state.offset_back + Vec3{0.0, 0.0, state.offset_up};
  const Vec3 desired_target = vehicle.p;
  if (!state.primed || state.smoothing_tau <= 0.0) {
    state.eye_smoothed = desired_eye;
    state.target_smoothed = desired_target;
    state.primed = true;
  } else {
    const double k = 1.0 - std::exp(-std::max(dt, 0.0) / state.smoothing_tau);
    state.eye_smoothed = state.eye_smoothed + (desired_eye - state.eye_smoothed) * k;
    state.target_smoothed = state.target_smoothed + (desired_target - state.target_smoothed) * k;
  }
  return {state, state.eye_smoothed, state.target_smoothed};
}

inline CameraMatrices follow_camera(Vec3 eye, Vec3 target, int width, int height, double far_plane,
                                    double fov_y = kDefaultFovY) {
  CameraMatrices cam;
  cam.width = width;
  cam.height = height;
  cam.view = look_at(eye, target, {0.0, 0.0, 1.0});
  cam.proj = perspective(fov_y, static_cast<double>(width) / height, 0.05,
                         std::max(far_plane, 1.0));
  return cam;
}

}  // namespace flymation
