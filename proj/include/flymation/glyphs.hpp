#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "flymation/math.hpp"
#include "flymation/model.hpp"

namespace flymation {

/// Unit-sized low-poly mesh, roughly spanning [-0.5, 0.5]^3 so that the
/// instance scale reads as the object size in meters.
struct GlyphMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;
};

namespace detail {

// Makes every triangle from `first` on face away from `center`.
inline void orient_outward(GlyphMesh& mesh, std::size_t first, Vec3 center) {
  for (std::size_t i = first; i < mesh.triangles.size(); ++i) {
    auto& t = mesh.triangles[i];
    const Vec3 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
    const Vec3 n = cross(b - a, c - a);
    if (dot(n, (a + b + c) / 3.0 - center) < 0.0) std::swap(t[1], t[2]);
  }
}

inline void add_box(GlyphMesh& mesh, Vec3 lo, Vec3 hi) {
  const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
  const std::size_t first = mesh.triangles.size();
  for (int i = 0; i < 8; ++i)
    mesh.vertices.push_back({(i & 1) ? hi.x : lo.x, (i & 2) ? hi.y : lo.y, (i & 4) ? hi.z : lo.z});
  // Two triangles per face; corner bits are (x, y, z).
  constexpr std::array<std::array<std::uint32_t, 4>, 6> faces{{{0, 2, 6, 4},
                                                               {1, 3, 7, 5},
                                                               {0, 1, 5, 4},
                                                               {2, 3, 7, 6},
                                                               {0, 1, 3, 2},
                                                               {4, 5, 7, 6}}};
  for (const auto& f : faces) {
    mesh.triangles.push_back({base + f[0], base + f[1], base + f[2]});
    mesh.triangles.push_back({base + f[0], base + f[2], base + f[3]});
  }
  orient_outward(mesh, first, (lo + hi) * 0.5);
}

// Flat n-gon disk around center, facing +Z.
inline void add_disk(GlyphMesh& mesh, Vec3 center, double radius, int sides) {
  const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
  const std::size_t first = mesh.triangles.size();
  mesh.vertices.push_back(center);
  for (int i = 0; i < sides; ++i) {
    const double a = 2.0 * kPi * i / sides;
    mesh.vertices.push_back(center + Vec3{radius * std::cos(a), radius * std::sin(a), 0.0});
  }
  for (int i = 0; i < sides; ++i) {
    const auto a = base + 1 + static_cast<std::uint32_t>(i);
    const auto b = base + 1 + static_cast<std::uint32_t>((i + 1) % sides);
    mesh.triangles.push_back({base, a, b});
  }
  orient_outward(mesh, first, center - Vec3{0.0, 0.0, 1.0});
}

inline GlyphMesh make_cube() {
  GlyphMesh m;
  add_box(m, {-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5});
  return m;
}

inline GlyphMesh make_icosphere() {
  GlyphMesh m;
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  const std::array<Vec3, 12> ico{{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                                  {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                                  {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}}};
  for (Vec3 v : ico) m.vertices.push_back(normalized(v) * 0.5);
  const std::array<std::array<std::uint32_t, 3>, 20> faces{
      {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
       {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
       {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}}};
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
  auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
    const auto key = std::minmax(a, b);
    if (auto it = midpoints.find(key); it != midpoints.end()) return it->second;
    const auto index = static_cast<std::uint32_t>(m.vertices.size());
    m.vertices.push_back(normalized(m.vertices[a] + m.vertices[b]) * 0.5);
    midpoints.emplace(key, index);
    return index;
  };
  for (const auto& f : faces) {
    const auto ab = midpoint(f[0], f[1]);
    const auto bc = midpoint(f[1], f[2]);
    const auto ca = midpoint(f[2], f[0]);
    m.triangles.push_back({f[0], ab, ca});
    m.triangles.push_back({f[1], bc, ab});
    m.triangles.push_back({f[2], ca, bc});
    m.triangles.push_back({ab, bc, ca});
  }
  orient_outward(m, 0, {});
  return m;
}

inline constexpr int kRoundSides = 16;

inline GlyphMesh make_cylinder() {
  GlyphMesh m;
  for (double z : {-0.5, 0.5}) {
    m.vertices.push_back({0.0, 0.0, z});
    for (int i = 0; i < kRoundSides; ++i) {
      const double a = 2.0 * kPi * i / kRoundSides;
      m.vertices.push_back({0.5 * std::cos(a), 0.5 * std::sin(a), z});
    }
  }
  const std::uint32_t top = kRoundSides + 1;
  for (std::uint32_t i = 0; i < kRoundSides; ++i) {
    const std::uint32_t a = 1 + i, b = 1 + (i + 1) % kRoundSides;
    m.triangles.push_back({0, b, a});
    m.triangles.push_back({top, top + a, top + b});
    m.triangles.push_back({a, b, top + b});
    m.triangles.push_back({a, top + b, top + a});
  }
  orient_outward(m, 0, {});
  return m;
}

inline GlyphMesh make_cone() {
  GlyphMesh m;
  m.vertices.push_back({0.0, 0.0, -0.5});
  for (int i = 0; i < kRoundSides; ++i) {
    const double a = 2.0 * kPi * i / kRoundSides;
    m.vertices.push_back({0.5 * std::cos(a), 0.5 * std::sin(a), -0.5});
  }
  const std::uint32_t apex = kRoundSides + 1;
  m.vertices.push_back({0.0, 0.0, 0.5});
  for (std::uint32_t i = 0; i < kRoundSides; ++i) {
    const std::uint32_t a = 1 + i, b = 1 + (i + 1) % kRoundSides;
    m.triangles.push_back({0, b, a});
    m.triangles.push_back({a, b, apex});
  }
  orient_outward(m, 0, {0.0, 0.0, -0.25});
  return m;
}

// Square frame in the body Y-Z plane; flight passes through along body X.
inline GlyphMesh make_gate() {
  GlyphMesh m;
  constexpr double o = 0.5, i = 0.4;
  add_box(m, {-o, -o, i}, {o, o, o});     // top
  add_box(m, {-o, -o, -o}, {o, o, -i});   // bottom
  add_box(m, {-o, -o, -i}, {o, -i, i});   // left
  add_box(m, {-o, i, -i}, {o, o, i});     // right
  return m;
}

// Box of the given half extents, yawed about +Z and moved to center.
inline void add_yawed_box(GlyphMesh& mesh, Vec3 center, Vec3 half, double yaw) {
  const std::size_t first_vertex = mesh.vertices.size();
  add_box(mesh, -half, half);
  const double c = std::cos(yaw), s = std::sin(yaw);
  for (std::size_t i = first_vertex; i < mesh.vertices.size(); ++i) {
    const Vec3 v = mesh.vertices[i];
    mesh.vertices[i] = center + Vec3{c * v.x - s * v.y, s * v.x + c * v.y, v.z};
  }
}

// X-configuration quadrotor, body X forward.
inline GlyphMesh make_quadrotor() {
  GlyphMesh m;
  add_box(m, {-0.15, -0.15, -0.06}, {0.15, 0.15, 0.06});
  constexpr double arm = 0.35;
  for (int k = 0; k < 4; ++k) {
    const double yaw = kPi / 4.0 + k * kPi / 2.0;
    const Vec3 dir{std::cos(yaw), std::sin(yaw), 0.0};
    add_yawed_box(m, dir * (0.5 * arm), {0.5 * arm, 0.03, 0.03}, yaw);
    add_disk(m, dir * arm + Vec3{0.0, 0.0, 0.07}, 0.15, kRoundSides);
  }
  return m;
}

}  // namespace detail

/// Canonical mesh for a glyph kind. Built once, immutable afterwards.
inline const GlyphMesh& glyph_mesh(GlyphKind kind) {
  static const std::array<GlyphMesh, 6> meshes{detail::make_icosphere(), detail::make_cube(),
                                               detail::make_cylinder(),  detail::make_cone(),
                                               detail::make_gate(),      detail::make_quadrotor()};
  return meshes[static_cast<std::size_t>(kind)];
}

}  // namespace flymation
