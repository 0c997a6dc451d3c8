#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "flymation/camera.hpp"
#include "flymation/compile.hpp"
#include "flymation/glyphs.hpp"
#include "flymation/math.hpp"

namespace flymation {

/// RGBA8 color plus binary32 depth, row-major from the top-left pixel.
/// Depth holds window depth in [0,1] and clears to 1.0 (the far sentinel).
struct Framebuffer {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> color;
  std::vector<float> depth;

  Framebuffer(int w, int h, Color clear)
      : width(w), height(h), color(static_cast<std::size_t>(w) * h * 4), depth(static_cast<std::size_t>(w) * h, 1.0f) {
    const std::array<std::uint8_t, 4> px = pack(clear);
    for (std::size_t i = 0; i < color.size(); i += 4) std::copy(px.begin(), px.end(), color.begin() + i);
  }

  static std::uint8_t to_u8(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  }

  static std::array<std::uint8_t, 4> pack(Color c) {
    return {to_u8(c.r), to_u8(c.g), to_u8(c.b), to_u8(c.a)};
  }

  std::array<std::uint8_t, 4> pixel(int x, int y) const {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 4;
    return {color[i], color[i + 1], color[i + 2], color[i + 3]};
  }

  float depth_at(int x, int y) const { return depth[static_cast<std::size_t>(y) * width + x]; }

  /// Depth-tested write. Opaque fragments replace color and depth; on an exact
  /// depth tie the smaller packed color wins, so opaque results do not depend
  /// on draw order. Translucent fragments blend source-over and leave depth.
  void shade(int x, int y, double window_depth, Color c) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    if (!(c.a > 0.0)) return;
    const std::size_t i = static_cast<std::size_t>(y) * width + x;
    const float d = static_cast<float>(window_depth);
    const float stored = depth[i];
    std::uint8_t* px = &color[i * 4];
    if (c.a >= 1.0) {
      const auto src = pack(c);
      if (d < stored || (d == stored && std::lexicographical_compare(src.begin(), src.end(), px, px + 4))) {
        std::copy(src.begin(), src.end(), px);
        depth[i] = d;
      }
      return;
    }
    if (!(d < stored)) return;
    const double a = c.a;
    const std::array<double, 3> src{c.r, c.g, c.b};
    for (int k = 0; k < 3; ++k)
      px[k] = to_u8(std::clamp(src[k], 0.0, 1.0) * a + (px[k] / 255.0) * (1.0 - a));
    px[3] = to_u8(a + (px[3] / 255.0) * (1.0 - a));
  }
};

namespace detail {

struct ClipVertex {
  Vec4 h;  // clip-space position
  Color c;
};

inline ClipVertex lerp_clip(const ClipVertex& a, const ClipVertex& b, double t) {
  return {{a.h.x + (b.h.x - a.h.x) * t, a.h.y + (b.h.y - a.h.y) * t, a.h.z + (b.h.z - a.h.z) * t,
           a.h.w + (b.h.w - a.h.w) * t},
          {a.c.r + (b.c.r - a.c.r) * t, a.c.g + (b.c.g - a.c.g) * t, a.c.b + (b.c.b - a.c.b) * t,
           a.c.a + (b.c.a - a.c.a) * t}};
}

// Guard band: generous enough that clipping against the side planes never
// touches on-screen geometry, small enough to keep fixed-point math in range.
inline constexpr double kGuardBand = 4.0;

// Signed distances to the clip planes: near, then the four guard-band sides.
inline std::array<double, 5> plane_distances(const Vec4& h) {
  return {h.z + h.w, kGuardBand * h.w - h.x, kGuardBand * h.w + h.x, kGuardBand * h.w - h.y,
          kGuardBand * h.w + h.y};
}

/// Sutherland-Hodgman against near + guard planes.
inline std::vector<ClipVertex> clip_polygon(std::vector<ClipVertex> poly) {
  for (std::size_t plane = 0; plane < 5 && !poly.empty(); ++plane) {
    std::vector<ClipVertex> out;
    out.reserve(poly.size() + 2);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const ClipVertex& a = poly[i];
      const ClipVertex& b = poly[(i + 1) % poly.size()];
      const double da = plane_distances(a.h)[plane];
      const double db = plane_distances(b.h)[plane];
      if (da >= 0.0) out.push_back(a);
      if ((da >= 0.0) != (db >= 0.0)) out.push_back(lerp_clip(a, b, da / (da - db)));
    }
    poly = std::move(out);
  }
  return poly;
}

/// Parametric clip of a segment; false when nothing survives.
inline bool clip_segment(ClipVertex& a, ClipVertex& b) {
  double t0 = 0.0, t1 = 1.0;
  const auto da = plane_distances(a.h);
  const auto db = plane_distances(b.h);
  for (std::size_t plane = 0; plane < 5; ++plane) {
    if (da[plane] < 0.0 && db[plane] < 0.0) return false;
    if (da[plane] < 0.0) t0 = std::max(t0, da[plane] / (da[plane] - db[plane]));
    else if (db[plane] < 0.0) t1 = std::min(t1, da[plane] / (da[plane] - db[plane]));
  }
  if (t0 > t1) return false;
  const ClipVertex a0 = a;
  if (t0 > 0.0) a = lerp_clip(a0, b, t0);
  if (t1 < 1.0) b = lerp_clip(a0, b, t1);
  return true;
}

struct ScreenVertex {
  double x = 0.0, y = 0.0, z = 0.0;  // pixels, pixels, window depth [0,1]
  Color c;
};

inline ScreenVertex to_screen(const ClipVertex& v, int width, int height) {
  const double inv_w = 1.0 / v.h.w;
  return {(v.h.x * inv_w + 1.0) * 0.5 * width, (1.0 - v.h.y * inv_w) * 0.5 * height,
          v.h.z * inv_w * 0.5 + 0.5, v.c};
}

inline ClipVertex to_clip(Vec3 p, Color c, const Mat4& view_proj) {
  return {view_proj * Vec4{p.x, p.y, p.z, 1.0}, c};
}

}  // namespace detail

/// DDA walk between two screen-space points (pixel coordinates, window
/// depth). Pixel (i, j) covers [i, i+1) x [j, j+1).
inline void draw_line_screen(Framebuffer& fb, const detail::ScreenVertex& a,
                             const detail::ScreenVertex& b, double width_px) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const auto steps = static_cast<long long>(std::ceil(std::max(std::abs(dx), std::abs(dy))));
  const int w = std::max(1, static_cast<int>(std::lround(width_px)));
  const int lo = -((w - 1) / 2);
  const int hi = lo + w - 1;
  const bool x_major = std::abs(dx) >= std::abs(dy);
  for (long long i = 0; i <= steps; ++i) {
    const double t = steps == 0 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps);
    const int px = static_cast<int>(std::floor(a.x + dx * t));
    const int py = static_cast<int>(std::floor(a.y + dy * t));
    const double z = a.z + (b.z - a.z) * t;
    const Color c{a.c.r + (b.c.r - a.c.r) * t, a.c.g + (b.c.g - a.c.g) * t,
                  a.c.b + (b.c.b - a.c.b) * t, a.c.a + (b.c.a - a.c.a) * t};
    for (int o = lo; o <= hi; ++o) {
      if (x_major) fb.shade(px, py + o, z, c);
      else fb.shade(px + o, py, z, c);
    }
  }
}

/// World-space segment: near-plane clip, project, then DDA with depth test.
inline void draw_line_3d(Framebuffer& fb, Vec3 p0, Vec3 p1, Color c0, Color c1,
                         const CameraMatrices& cam, double width_px) {
  const Mat4 vp = cam.proj * cam.view;
  detail::ClipVertex a = detail::to_clip(p0, c0, vp);
  detail::ClipVertex b = detail::to_clip(p1, c1, vp);
  if (!detail::clip_segment(a, b)) return;
  draw_line_screen(fb, detail::to_screen(a, fb.width, fb.height),
                   detail::to_screen(b, fb.width, fb.height), width_px);
}

inline constexpr double kAmbient = 0.35;
inline constexpr double kDiffuse = 0.65;

/// Fixed light direction normalize(1,1,1).
inline Vec3 light_direction() { return normalized(Vec3{1.0, 1.0, 1.0}); }

/// 0.35 + 0.65 * max(0, n.L) for a world-space triangle.
inline double flat_shade_factor(Vec3 p0, Vec3 p1, Vec3 p2) {
  const Vec3 n = cross(p1 - p0, p2 - p0);
  const double len = norm(n);
  if (!(len > 0.0)) return kAmbient;
  return kAmbient + kDiffuse * std::max(0.0, dot(n / len, light_direction()));
}

struct WorldVertex {
  Vec3 p;
  Color c;
};

namespace detail {

inline constexpr int kSubpixelBits = 8;
inline constexpr std::int64_t kSubpixel = 1 << kSubpixelBits;

struct FixedPoint {
  std::int64_t x, y;
};

inline std::int64_t edge(FixedPoint a, FixedPoint b, FixedPoint p) {
  return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

// With positive-area winding in y-down screen space, top edges run +x and
// left edges run -y.
inline bool is_top_left(FixedPoint a, FixedPoint b) {
  const std::int64_t dy = b.y - a.y;
  const std::int64_t dx = b.x - a.x;
  return (dy == 0 && dx > 0) || dy < 0;
}

// Barycentric blend that returns the shared value exactly when all three agree;
// otherwise an opaque alpha of 1 could come back as 0.999... and skip the depth write.
inline double mix3(double a, double b, double c, double l0, double l1, double l2) {
  if (a == b && b == c) return a;
  return l0 * a + l1 * b + l2 * c;
}

/// Barycentric fill with the top-left rule on 8-bit subpixel coordinates.
inline void fill_screen_triangle(Framebuffer& fb, ScreenVertex v0, ScreenVertex v1, ScreenVertex v2) {
  auto fixed = [](const ScreenVertex& v) {
    return FixedPoint{std::llround(v.x * kSubpixel), std::llround(v.y * kSubpixel)};
  };
  FixedPoint f0 = fixed(v0), f1 = fixed(v1), f2 = fixed(v2);
  std::int64_t area = edge(f0, f1, f2);
  if (area == 0) return;
  if (area < 0) {
    std::swap(f1, f2);
    std::swap(v1, v2);
    area = -area;
  }
  const auto floor_px = [](std::int64_t v) {
    return static_cast<int>(v >= 0 ? v / kSubpixel : -((-v + kSubpixel - 1) / kSubpixel));
  };
  const int min_x = std::max(0, floor_px(std::min({f0.x, f1.x, f2.x})));
  const int max_x = std::min(fb.width - 1, floor_px(std::max({f0.x, f1.x, f2.x})));
  const int min_y = std::max(0, floor_px(std::min({f0.y, f1.y, f2.y})));
  const int max_y = std::min(fb.height - 1, floor_px(std::max({f0.y, f1.y, f2.y})));
  const bool tl0 = is_top_left(f1, f2), tl1 = is_top_left(f2, f0), tl2 = is_top_left(f0, f1);
  const double inv_area = 1.0 / static_cast<double>(area);
  for (int y = min_y; y <= max_y; ++y) {
    for (int x = min_x; x <= max_x; ++x) {
      const FixedPoint p{static_cast<std::int64_t>(x) * kSubpixel + kSubpixel / 2,
                         static_cast<std::int64_t>(y) * kSubpixel + kSubpixel / 2};
      const std::int64_t w0 = edge(f1, f2, p);
      const std::int64_t w1 = edge(f2, f0, p);
      const std::int64_t w2 = edge(f0, f1, p);
      if (w0 < 0 || w1 < 0 || w2 < 0) continue;
      if ((w0 == 0 && !tl0) || (w1 == 0 && !tl1) || (w2 == 0 && !tl2)) continue;
      const double l0 = w0 * inv_area, l1 = w1 * inv_area, l2 = w2 * inv_area;
      const double z = l0 * v0.z + l1 * v1.z + l2 * v2.z;
      const Color c{mix3(v0.c.r, v1.c.r, v2.c.r, l0, l1, l2), mix3(v0.c.g, v1.c.g, v2.c.g, l0, l1, l2),
                    mix3(v0.c.b, v1.c.b, v2.c.b, l0, l1, l2), mix3(v0.c.a, v1.c.a, v2.c.a, l0, l1, l2)};
      fb.shade(x, y, z, c);
    }
  }
}

}  // namespace detail

/// World-space triangle: near-plane clip (0-2 triangles), no culling,
/// top-left fill rule, depth test, optional flat shading.
inline void draw_triangle(Framebuffer& fb, const std::array<WorldVertex, 3>& tri,
                          const CameraMatrices& cam, bool flat_normal_shade) {
  std::array<Color, 3> colors{tri[0].c, tri[1].c, tri[2].c};
  if (flat_normal_shade) {
    const double k = flat_shade_factor(tri[0].p, tri[1].p, tri[2].p);
    for (Color& c : colors) c = {c.r * k, c.g * k, c.b * k, c.a};
  }
  const Mat4 vp = cam.proj * cam.view;
  std::vector<detail::ClipVertex> poly{detail::to_clip(tri[0].p, colors[0], vp),
                                       detail::to_clip(tri[1].p, colors[1], vp),
                                       detail::to_clip(tri[2].p, colors[2], vp)};
  poly = detail::clip_polygon(std::move(poly));
  if (poly.size() < 3) return;
  const auto s0 = detail::to_screen(poly[0], fb.width, fb.height);
  for (std::size_t i = 1; i + 1 < poly.size(); ++i)
    detail::fill_screen_triangle(fb, s0, detail::to_screen(poly[i], fb.width, fb.height),
                                 detail::to_screen(poly[i + 1], fb.width, fb.height));
}

/// World-space triangles of one glyph instance, in mesh order.
inline std::vector<std::array<WorldVertex, 3>> glyph_triangles(const GlyphInstance& glyph) {
  const GlyphMesh& mesh = glyph_mesh(glyph.kind);
  std::vector<Vec3> world(mesh.vertices.size());
  for (std::size_t i = 0; i < world.size(); ++i) world[i] = transform_point(glyph.transform, mesh.vertices[i]);
  std::vector<std::array<WorldVertex, 3>> out;
  out.reserve(mesh.triangles.size());
  for (const auto& t : mesh.triangles)
    out.push_back({WorldVertex{world[t[0]], glyph.color}, WorldVertex{world[t[1]], glyph.color},
                   WorldVertex{world[t[2]], glyph.color}});
  return out;
}

namespace detail {

// Deferred translucent primitive: a glyph triangle or one polyline segment.
// The key holds its full content so ties in depth break the same way no
// matter how the batch was ordered.
struct Translucent {
  double depth = 0.0;
  bool segment = false;
  double width = 0.0;
  std::array<WorldVertex, 3> v{};
  std::array<double, 23> key{};
};

inline std::array<double, 23> content_key(bool segment, double width, const std::array<WorldVertex, 3>& v) {
  std::array<double, 23> k{};
  std::size_t i = 0;
  k[i++] = segment ? 1.0 : 0.0;
  k[i++] = width;
  for (const WorldVertex& w : v) {
    for (double x : {w.p.x, w.p.y, w.p.z}) k[i++] = x;
    for (double x : {w.c.r, w.c.g, w.c.b, w.c.a}) k[i++] = x;
  }
  return k;
}

}  // namespace detail

/// Renders a batch: opaque glyph triangles and fully opaque line segments
/// under the depth test first, then every translucent triangle and segment
/// back to front by view depth. Output bytes depend only on the batch
/// contents, not on the order of its glyphs or polylines.
inline Framebuffer render(const RenderBatch& batch, const CameraMatrices& cam, int width, int height) {
  Framebuffer fb(std::max(width, 1), std::max(height, 1), batch.background);
  CameraMatrices c = cam;
  c.width = fb.width;
  c.height = fb.height;
  auto view_depth = [&](Vec3 p) { return -(c.view * Vec4{p.x, p.y, p.z, 1.0}).z; };

  std::vector<detail::Translucent> translucent;
  for (const GlyphInstance& glyph : batch.glyphs) {
    const bool opaque = glyph.color.a >= 1.0;
    for (const auto& tri : glyph_triangles(glyph)) {
      if (opaque) {
        draw_triangle(fb, tri, c, true);
        continue;
      }
      detail::Translucent t;
      t.depth = view_depth((tri[0].p + tri[1].p + tri[2].p) / 3.0);
      t.v = tri;
      t.key = detail::content_key(false, 0.0, tri);
      translucent.push_back(t);
    }
  }
  for (const Polyline& line : batch.polylines) {
    for (std::size_t i = 0; i + 1 < line.vertices.size(); ++i) {
      const Color& c0 = line.colors[i];
      const Color& c1 = line.colors[i + 1];
      if (c0.a >= 1.0 && c1.a >= 1.0) {
        draw_line_3d(fb, line.vertices[i], line.vertices[i + 1], c0, c1, c, line.width_px);
        continue;
      }
      detail::Translucent t;
      t.segment = true;
      t.width = line.width_px;
      t.depth = view_depth((line.vertices[i] + line.vertices[i + 1]) * 0.5);
      t.v = {WorldVertex{line.vertices[i], c0}, WorldVertex{line.vertices[i + 1], c1}, WorldVertex{}};
      t.key = detail::content_key(true, t.width, t.v);
      translucent.push_back(t);
    }
  }
  std::sort(translucent.begin(), translucent.end(), [](const detail::Translucent& a, const detail::Translucent& b) {
    if (a.depth != b.depth) return a.depth > b.depth;
    return a.key < b.key;
  });
  for (const detail::Translucent& t : translucent) {
    if (t.segment) draw_line_3d(fb, t.v[0].p, t.v[1].p, t.v[0].c, t.v[1].c, c, t.width);
    else draw_triangle(fb, t.v, c, true);
  }
  return fb;
}

}  // namespace flymation
