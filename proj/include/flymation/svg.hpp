#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <string>
#include <vector>

#include "flymation/camera.hpp"
#include "flymation/compile.hpp"
#include "flymation/raster.hpp"

namespace flymation {

namespace detail {

inline void append_fixed(std::string& out, double v, int digits = 2) {
  std::array<char, 48> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, digits);
  (void)ec;
  out.append(buf.data(), ptr);
}

inline std::string svg_rgb(Color c) {
  const auto px = Framebuffer::pack(c);
  return "rgb(" + std::to_string(px[0]) + "," + std::to_string(px[1]) + "," + std::to_string(px[2]) + ")";
}

struct SvgElement {
  double depth;
  std::size_t order;
  std::string text;
};

}  // namespace detail

/// Vector snapshot. Polylines and glyph triangles are projected and written
/// back to front by centroid depth (painter's algorithm), so intersecting
/// primitives may sort imperfectly. Vertices behind the camera split a
/// polyline; triangles touching them are dropped.
inline std::string export_svg(const RenderBatch& batch, const CameraMatrices& cam, int width, int height) {
  CameraMatrices c = cam;
  c.width = width;
  c.height = height;
  std::vector<detail::SvgElement> elements;

  for (const GlyphInstance& glyph : batch.glyphs) {
    for (const auto& tri : glyph_triangles(glyph)) {
      std::array<Projection, 3> pr{project(tri[0].p, c), project(tri[1].p, c), project(tri[2].p, c)};
      if (!pr[0].in_front || !pr[1].in_front || !pr[2].in_front) continue;
      const double k = flat_shade_factor(tri[0].p, tri[1].p, tri[2].p);
      const Color shaded{glyph.color.r * k, glyph.color.g * k, glyph.color.b * k, glyph.color.a};
      std::string s = "<path d=\"M";
      for (std::size_t i = 0; i < 3; ++i) {
        if (i != 0) s += " L";
        s += ' ';
        detail::append_fixed(s, pr[i].x);
        s += ' ';
        detail::append_fixed(s, pr[i].y);
      }
      s += " Z\" fill=\"" + detail::svg_rgb(shaded) + "\"";
      if (glyph.color.a < 1.0) {
        s += " fill-opacity=\"";
        detail::append_fixed(s, glyph.color.a, 3);
        s += "\"";
      }
      s += "/>\n";
      elements.push_back({(pr[0].depth + pr[1].depth + pr[2].depth) / 3.0, elements.size(), std::move(s)});
    }
  }

  for (const Polyline& line : batch.polylines) {
    std::size_t i = 0;
    while (i < line.vertices.size()) {
      std::vector<Projection> run;
      Color sum{0.0, 0.0, 0.0, 0.0};
      for (; i < line.vertices.size(); ++i) {
        const Projection p = project(line.vertices[i], c);
        if (!p.in_front) break;
        run.push_back(p);
        const Color& vc = line.colors[i];
        sum = {sum.r + vc.r, sum.g + vc.g, sum.b + vc.b, sum.a + vc.a};
      }
      ++i;
      if (run.size() < 2) continue;
      const double n = static_cast<double>(run.size());
      const Color mean{sum.r / n, sum.g / n, sum.b / n, sum.a / n};
      std::string s = "<path d=\"";
      double depth = 0.0;
      for (std::size_t k = 0; k < run.size(); ++k) {
        s += k == 0 ? "M " : " L ";
        detail::append_fixed(s, run[k].x);
        s += ' ';
        detail::append_fixed(s, run[k].y);
        depth += run[k].depth;
      }
      s += "\" fill=\"none\" stroke=\"" + detail::svg_rgb(mean) + "\" stroke-width=\"";
      detail::append_fixed(s, line.width_px);
      s += "\"";
      if (mean.a < 1.0) {
        s += " stroke-opacity=\"";
        detail::append_fixed(s, mean.a, 3);
        s += "\"";
      }
      s += " stroke-linecap=\"round\" stroke-linejoin=\"round\"/>\n";
      elements.push_back({depth / n, elements.size(), std::move(s)});
    }
  }

  std::stable_sort(elements.begin(), elements.end(),
                   [](const detail::SvgElement& a, const detail::SvgElement& b) { return a.depth > b.depth; });

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) + " " +
         std::to_string(height) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\" fill=\"" + detail::svg_rgb(batch.background) + "\"/>\n";
  for (const auto& e : elements) out += e.text;
  out += "</svg>\n";
  return out;
}

}  // namespace flymation
