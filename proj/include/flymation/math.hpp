#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace flymation {

// Right-handed world frame, Z up, X forward.

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double k) { return {a.x * k, a.y * k, a.z * k}; }
constexpr Vec3 operator*(double k, Vec3 a) { return a * k; }
constexpr Vec3 operator/(Vec3 a, double k) { return {a.x / k, a.y / k, a.z / k}; }

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

inline Vec3 normalized(Vec3 a) { return a / norm(a); }

inline bool is_finite(Vec3 a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

/// Unit quaternion, scalar first, Hamilton product, body-to-world rotation.
struct Quat {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  static constexpr Quat identity() { return {1.0, 0.0, 0.0, 0.0}; }

  friend constexpr bool operator==(const Quat&, const Quat&) = default;
};

constexpr double dot(Quat a, Quat b) { return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z; }

inline double norm(Quat q) { return std::sqrt(dot(q, q)); }

constexpr Quat operator*(Quat a, Quat b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

constexpr Quat conjugate(Quat q) { return {q.w, -q.x, -q.y, -q.z}; }

inline bool is_finite(Quat q) {
  return std::isfinite(q.w) && std::isfinite(q.x) && std::isfinite(q.y) && std::isfinite(q.z);
}

/// Rotates v by q. q is assumed unit.
constexpr Vec3 rotate(Quat q, Vec3 v) {
  // t = 2 * cross(q.xyz, v); v' = v + w t + cross(q.xyz, t)
  const Vec3 u{q.x, q.y, q.z};
  const Vec3 t = 2.0 * cross(u, v);
  return v + q.w * t + cross(u, t);
}

inline Quat quat_from_axis_angle(Vec3 axis, double angle) {
  const Vec3 a = normalized(axis);
  const double h = 0.5 * angle;
  const double s = std::sin(h);
  return {std::cos(h), a.x * s, a.y * s, a.z * s};
}

/// Rotation about +Z by yaw, then about the rotated +Y by pitch (nose down for positive pitch).
inline Quat quat_from_yaw_pitch(double yaw, double pitch) {
  const Quat qz{std::cos(0.5 * yaw), 0.0, 0.0, std::sin(0.5 * yaw)};
  const Quat qy{std::cos(0.5 * pitch), 0.0, std::sin(0.5 * pitch), 0.0};
  return qz * qy;
}

/// Heading of the body X axis projected on the ground plane.
inline double yaw_of(Quat q) {
  return std::atan2(2.0 * (q.w * q.z + q.x * q.y), 1.0 - 2.0 * (q.y * q.y + q.z * q.z));
}

/// Rotation angle in [0, pi] between two unit quaternions, sign-insensitive.
inline double angle_between(Quat a, Quat b) {
  const Quat d = conjugate(a) * b;
  const double v = std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
  return 2.0 * std::atan2(v, std::abs(d.w));
}

struct Color {
  double r = 0.0, g = 0.0, b = 0.0, a = 1.0;

  friend constexpr bool operator==(const Color&, const Color&) = default;
};

inline bool is_finite(Color c) {
  return std::isfinite(c.r) && std::isfinite(c.g) && std::isfinite(c.b) && std::isfinite(c.a);
}

inline bool in_unit_range(Color c) {
  auto ok = [](double v) { return v >= 0.0 && v <= 1.0; };
  return ok(c.r) && ok(c.g) && ok(c.b) && ok(c.a);
}

/// 4x4 matrix, row-major storage, column-vector convention (p' = M p).
struct Mat4 {
  std::array<double, 16> m{};

  static constexpr Mat4 identity() {
    Mat4 r;
    r(0, 0) = r(1, 1) = r(2, 2) = r(3, 3) = 1.0;
    return r;
  }

  constexpr double& operator()(std::size_t row, std::size_t col) { return m[row * 4 + col]; }
  constexpr double operator()(std::size_t row, std::size_t col) const { return m[row * 4 + col]; }

  friend constexpr bool operator==(const Mat4&, const Mat4&) = default;
};

constexpr Mat4 operator*(const Mat4& a, const Mat4& b) {
  Mat4 r;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 4; ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  }
  return r;
}

struct Vec4 {
  double x = 0.0, y = 0.0, z = 0.0, w = 0.0;
};

constexpr Vec4 operator*(const Mat4& a, Vec4 v) {
  return {a(0, 0) * v.x + a(0, 1) * v.y + a(0, 2) * v.z + a(0, 3) * v.w,
          a(1, 0) * v.x + a(1, 1) * v.y + a(1, 2) * v.z + a(1, 3) * v.w,
          a(2, 0) * v.x + a(2, 1) * v.y + a(2, 2) * v.z + a(2, 3) * v.w,
          a(3, 0) * v.x + a(3, 1) * v.y + a(3, 2) * v.z + a(3, 3) * v.w};
}

/// Applies the affine part of m to a point.
constexpr Vec3 transform_point(const Mat4& m, Vec3 p) {
  const Vec4 r = m * Vec4{p.x, p.y, p.z, 1.0};
  return {r.x, r.y, r.z};
}

/// T * R * S built from a pose and per-axis scale.
inline Mat4 compose_trs(Vec3 p, Quat q, Vec3 s) {
  const double ww = q.w * q.w, xx = q.x * q.x, yy = q.y * q.y, zz = q.z * q.z;
  const double wx = q.w * q.x, wy = q.w * q.y, wz = q.w * q.z;
  const double xy = q.x * q.y, xz = q.x * q.z, yz = q.y * q.z;
  Mat4 r = Mat4::identity();
  r(0, 0) = (ww + xx - yy - zz) * s.x;
  r(0, 1) = 2.0 * (xy - wz) * s.y;
  r(0, 2) = 2.0 * (xz + wy) * s.z;
  r(1, 0) = 2.0 * (xy + wz) * s.x;
  r(1, 1) = (ww - xx + yy - zz) * s.y;
  r(1, 2) = 2.0 * (yz - wx) * s.z;
  r(2, 0) = 2.0 * (xz - wy) * s.x;
  r(2, 1) = 2.0 * (yz + wx) * s.y;
  r(2, 2) = (ww - xx - yy + zz) * s.z;
  r(0, 3) = p.x;
  r(1, 3) = p.y;
  r(2, 3) = p.z;
  return r;
}

/// Determinant of the upper-left 3x3 block.
constexpr double linear_determinant(const Mat4& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

struct Aabb {
  Vec3 min;
  Vec3 max;

  constexpr Vec3 center() const { return (min + max) * 0.5; }
  Vec3 extent() const { return max - min; }
  bool contains(Vec3 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
           p.z <= max.z;
  }

  friend constexpr bool operator==(const Aabb&, const Aabb&) = default;
};

inline constexpr double kPi = 3.14159265358979323846;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }

}  // namespace flymation
