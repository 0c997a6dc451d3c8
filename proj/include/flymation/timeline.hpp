#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "flymation/model.hpp"

namespace flymation {

/// Interpolated pose. Fields other than `visible` are meaningless when hidden.
struct PoseSample {
  Vec3 p;
  Quat q;
  Vec3 v;
  Color c;
  Vec3 s{1.0, 1.0, 1.0};
  bool visible = false;
};

/// Where a query time falls relative to an ordered list of knot times.
struct Location {
  enum class Kind { before, after, at, between };

  Kind kind = Kind::before;
  std::size_t index = 0;  // knot for `at`, left knot for `between`
  double u = 0.0;         // in (0,1) for `between`

  friend bool operator==(const Location&, const Location&) = default;
};

/// Binary search over strictly increasing knot times.
inline Location locate(std::span<const double> times, double t) {
  using K = Location::Kind;
  if (times.empty() || t < times.front()) return {K::before, 0, 0.0};
  if (t > times.back()) return {K::after, times.size() - 1, 0.0};
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  const auto i = static_cast<std::size_t>(it - times.begin());
  if (*it == t) return {K::at, i, 0.0};
  const double t_lo = times[i - 1];
  double u = (t - t_lo) / (times[i] - t_lo);
  if (!(u < 1.0)) u = std::nextafter(1.0, 0.0);
  if (!(u > 0.0)) u = std::nextafter(0.0, 1.0);
  return {K::between, i - 1, u};
}

/// Knot-time view over a trajectory without copying.
inline Location locate(std::span<const StateSample> samples, double t) {
  using K = Location::Kind;
  if (samples.empty() || t < samples.front().t) return {K::before, 0, 0.0};
  if (t > samples.back().t) return {K::after, samples.size() - 1, 0.0};
  const auto it = std::lower_bound(samples.begin(), samples.end(), t,
                                   [](const StateSample& s, double v) { return s.t < v; });
  const auto i = static_cast<std::size_t>(it - samples.begin());
  if (it->t == t) return {K::at, i, 0.0};
  const double t_lo = samples[i - 1].t;
  double u = (t - t_lo) / (samples[i].t - t_lo);
  if (!(u < 1.0)) u = std::nextafter(1.0, 0.0);
  if (!(u > 0.0)) u = std::nextafter(0.0, 1.0);
  return {K::between, i - 1, u};
}

inline Vec3 lerp_vec3(Vec3 a, Vec3 b, double u) {
  if (u <= 0.0) return a;
  if (u >= 1.0) return b;
  return {a.x + (b.x - a.x) * u, a.y + (b.y - a.y) * u, a.z + (b.z - a.z) * u};
}

inline Color lerp_color(Color a, Color b, double u) {
  if (u <= 0.0) return a;
  if (u >= 1.0) return b;
  auto mix = [u](double x, double y) { return std::clamp(x + (y - x) * u, 0.0, 1.0); };
  return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b), mix(a.a, b.a)};
}

/// Shortest-arc spherical interpolation of unit quaternions.
inline Quat slerp(Quat q0, Quat q1, double u) {
  double d = dot(q0, q1);
  if (d < 0.0) {
    q1 = {-q1.w, -q1.x, -q1.y, -q1.z};
    d = -d;
  }
  double k0 = 1.0 - u;
  double k1 = u;
  if (d <= 1.0 - 1e-6) {
    const double theta = std::acos(d);
    const double sin_theta = std::sin(theta);
    k0 = std::sin((1.0 - u) * theta) / sin_theta;
    k1 = std::sin(u * theta) / sin_theta;
  }
  const Quat r{k0 * q0.w + k1 * q1.w, k0 * q0.x + k1 * q1.x, k0 * q0.y + k1 * q1.y,
               k0 * q0.z + k1 * q1.z};
  const double n = norm(r);
  return {r.w / n, r.x / n, r.y / n, r.z / n};
}

/// Pose at time t. Hidden outside the sampled range; exact at knots.
inline PoseSample sample_trajectory(const Trajectory& traj, double t) {
  const Location loc = locate(traj.samples, t);
  switch (loc.kind) {
    case Location::Kind::before:
    case Location::Kind::after:
      return {};
    case Location::Kind::at: {
      const StateSample& k = traj.samples[loc.index];
      return {k.p, k.q, k.v, k.c, k.s, true};
    }
    case Location::Kind::between:
      break;
  }
  const StateSample& a = traj.samples[loc.index];
  const StateSample& b = traj.samples[loc.index + 1];
  const double u = loc.u;
  return {lerp_vec3(a.p, b.p, u), slerp(a.q, b.q, u), lerp_vec3(a.v, b.v, u),
          lerp_color(a.c, b.c, u), lerp_vec3(a.s, b.s, u), true};
}

struct PlaybackClock {
  double t = 0.0;
  double rate = 1.0;
  bool looping = false;
  TimeRange range;
};

/// Advances the clock by a wall-time step. Pure; loops or clamps at the ends.
inline PlaybackClock advance(PlaybackClock clock, double wall_dt) {
  const double t0 = clock.range.t0;
  const double t1 = clock.range.t1;
  double t = clock.t + wall_dt * clock.rate;
  if (clock.looping) {
    const double len = t1 - t0;
    if (len <= 0.0) {
      t = t0;
    } else {
      t = std::fmod(t - t0, len);
      if (t < 0.0) t += len;
      t += t0;
      if (t > t1) t = t0;
    }
  } else {
    t = std::clamp(t, t0, t1);
  }
  clock.t = t;
  return clock;
}

/// Evenly spaced instants from t0, including t1 when it lands on the grid.
/// Without an interval the range is split into 20 steps.
inline std::vector<double> timelapse_instants(TimeRange range,
                                              std::optional<double> interval = std::nullopt) {
  const double len = range.length();
  if (!interval) {
    if (len <= 0.0) return {range.t0};
    interval = len / 20.0;
  }
  const double dt = *interval;
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("timelapse interval must be > 0");
  const double steps = std::floor(len / dt + 1e-9);
  const auto n = static_cast<std::size_t>(std::max(0.0, steps));
  std::vector<double> out;
  out.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) out.push_back(range.t0 + static_cast<double>(k) * dt);
  // Snap the grid point that coincides with t1 (up to rounding) onto t1.
  if (n > 0 && std::abs(out.back() - range.t1) <= 1e-9 * std::max(1.0, std::abs(len)))
    out.back() = range.t1;
  if (!out.empty() && out.back() > range.t1) out.back() = range.t1;
  return out;
}

}  // namespace flymation
