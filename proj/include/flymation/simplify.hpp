#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "flymation/math.hpp"
#include "flymation/model.hpp"

namespace flymation {

/// Strictly increasing indices into a source polyline; first and last always present.
using IndexSubsequence = std::vector<std::size_t>;

/// Euclidean distance from p to the closed segment [a, b].
inline double point_segment_distance(Vec3 p, Vec3 a, Vec3 b) {
  const Vec3 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return norm(p - a);
  const double u = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + ab * u));
}

/// Ramer-Douglas-Peucker simplification. Iterative, so depth is bounded by
/// the heap rather than the call stack. Ties go to the lowest index.
inline IndexSubsequence rdp(std::span<const Vec3> points, double epsilon) {
  if (points.size() < 2) throw std::invalid_argument("rdp needs at least 2 points");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("rdp epsilon must be >= 0");

  std::vector<std::uint8_t> keep(points.size(), 0);
  keep.front() = 1;
  keep.back() = 1;
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  stack.emplace_back(0, points.size() - 1);
  while (!stack.empty()) {
    const auto [first, last] = stack.back();
    stack.pop_back();
    if (last - first < 2) continue;
    double best = -1.0;
    std::size_t best_index = first;
    for (std::size_t i = first + 1; i < last; ++i) {
      const double d = point_segment_distance(points[i], points[first], points[last]);
      if (d > best) {
        best = d;
        best_index = i;
      }
    }
    if (best > epsilon) {
      keep[best_index] = 1;
      stack.emplace_back(best_index, last);
      stack.emplace_back(first, best_index);
    }
  }

  IndexSubsequence out;
  for (std::size_t i = 0; i < keep.size(); ++i)
    if (keep[i]) out.push_back(i);
  return out;
}

/// Evenly spaced indices including both ends; all indices when n <= max_points.
inline IndexSubsequence uniform_decimate(std::size_t n_points, std::size_t max_points) {
  if (max_points < 2) throw std::invalid_argument("uniform_decimate needs max_points >= 2");
  IndexSubsequence out;
  if (n_points <= max_points) {
    out.resize(n_points);
    for (std::size_t i = 0; i < n_points; ++i) out[i] = i;
    return out;
  }
  out.reserve(max_points);
  const auto span = static_cast<std::uint64_t>(n_points - 1);
  const auto steps = static_cast<std::uint64_t>(max_points - 1);
  for (std::uint64_t k = 0; k <= steps; ++k)
    out.push_back(static_cast<std::size_t>(k * span / steps));
  return out;
}

inline constexpr std::size_t kDefaultChunkPoints = 65535;

/// Inclusive index ranges of at most max_points each. Neighbouring ranges
/// share their boundary index so the pieces stay connected.
inline std::vector<std::pair<std::size_t, std::size_t>> chunk(std::size_t n_points,
                                                              std::size_t max_points) {
  if (max_points < 2) throw std::invalid_argument("chunk needs max_points >= 2");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (n_points == 0) return out;
  if (n_points == 1) return {{0, 0}};
  std::size_t start = 0;
  while (start < n_points - 1) {
    const std::size_t end = std::min(start + max_points - 1, n_points - 1);
    out.emplace_back(start, end);
    start = end;
  }
  return out;
}

inline std::vector<std::pair<std::size_t, std::size_t>> chunk(
    const Trajectory& traj, std::size_t max_points = kDefaultChunkPoints) {
  return chunk(traj.samples.size(), max_points);
}

}  // namespace flymation
