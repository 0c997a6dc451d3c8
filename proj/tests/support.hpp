#pragma once

// Shared helpers for the test binaries: temporary folders, random scene
// pieces and independent reference implementations used as oracles.

#include <array>
#include <atomic>
#include <boost/numeric/odeint.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "flymation/flymation.hpp"

namespace fm_test {

using namespace flymation;

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("flymation_" + tag + "_" + std::to_string(stamp) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec3 random_vec(std::mt19937_64& rng, double lo, double hi) {
  return {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
}

/// Uniformly distributed unit quaternion (Shoemake).
inline Quat random_quat(std::mt19937_64& rng) {
  const double u1 = uniform(rng, 0.0, 1.0), u2 = uniform(rng, 0.0, 2.0 * kPi), u3 = uniform(rng, 0.0, 2.0 * kPi);
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  return {a * std::sin(u2), a * std::cos(u2), b * std::sin(u3), b * std::cos(u3)};
}

inline Color random_color(std::mt19937_64& rng) {
  return {uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0)};
}

/// Strictly increasing, irregular times.
inline std::vector<StateSample> random_samples(std::mt19937_64& rng, std::size_t n, double t0 = 0.0) {
  std::vector<StateSample> out(n);
  double t = t0;
  for (auto& s : out) {
    s.t = t;
    t += uniform(rng, 1e-3, 0.5);
    s.p = random_vec(rng, -100.0, 100.0);
    s.q = random_quat(rng);
    s.v = random_vec(rng, -20.0, 20.0);
    s.c = random_color(rng);
    s.s = random_vec(rng, 0.01, 5.0);
  }
  return out;
}

inline Trajectory make_trajectory(std::string id, std::vector<StateSample> samples,
                                  GlyphKind glyph = GlyphKind::cube) {
  Trajectory t;
  t.id = std::move(id);
  t.glyph = glyph;
  t.samples = std::move(samples);
  return t;
}

/// Straight-line samples from a to b over [t0, t1], identity attitude.
inline std::vector<StateSample> line_samples(Vec3 a, Vec3 b, double t0, double t1, std::size_t n,
                                             Color c = {1.0, 1.0, 1.0, 1.0}) {
  std::vector<StateSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    out[i].t = t0 + (t1 - t0) * u;
    out[i].p = a + (b - a) * u;
    out[i].c = c;
    out[i].v = (b - a) / std::max(t1 - t0, 1e-12);
  }
  return out;
}

inline SceneConfig minimal_config() {
  SceneConfig c;
  c.vehicle_dir = "vehicles";
  c.dynamic_dir = "dynamic";
  c.static_dir = "static";
  return c;
}

// --- oracles ----------------------------------------------------------------------------

/// Textbook recursive Douglas-Peucker with lowest-index tie-break.
inline void rdp_recursive(const std::vector<Vec3>& pts, std::size_t first, std::size_t last, double eps,
                          std::vector<bool>& keep) {
  if (last <= first + 1) return;
  double best = -1.0;
  std::size_t best_i = first;
  for (std::size_t i = first + 1; i < last; ++i) {
    // Distance computed independently: projection parameter on the segment.
    const Vec3 a = pts[first], b = pts[last], p = pts[i];
    const double dx = b.x - a.x, dy = b.y - a.y, dz = b.z - a.z;
    const double l2 = dx * dx + dy * dy + dz * dz;
    double d;
    if (l2 == 0.0) {
      d = std::sqrt((p.x - a.x) * (p.x - a.x) + (p.y - a.y) * (p.y - a.y) + (p.z - a.z) * (p.z - a.z));
    } else {
      double u = ((p.x - a.x) * dx + (p.y - a.y) * dy + (p.z - a.z) * dz) / l2;
      u = u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u);
      const double qx = a.x + dx * u - p.x, qy = a.y + dy * u - p.y, qz = a.z + dz * u - p.z;
      d = std::sqrt(qx * qx + qy * qy + qz * qz);
    }
    if (d > best) {
      best = d;
      best_i = i;
    }
  }
  if (best > eps) {
    keep[best_i] = true;
    rdp_recursive(pts, first, best_i, eps, keep);
    rdp_recursive(pts, best_i, last, eps, keep);
  }
}

inline std::vector<std::size_t> rdp_oracle(const std::vector<Vec3>& pts, double eps) {
  std::vector<bool> keep(pts.size(), false);
  keep.front() = keep.back() = true;
  rdp_recursive(pts, 0, pts.size() - 1, eps, keep);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (keep[i]) out.push_back(i);
  return out;
}

/// Linear scan over knot times.
inline Location locate_oracle(const std::vector<double>& times, double t) {
  using K = Location::Kind;
  if (times.empty() || t < times.front()) return {K::before, 0, 0.0};
  if (t > times.back()) return {K::after, times.size() - 1, 0.0};
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] == t) return {K::at, i, 0.0};
    if (times[i] > t) {
      double u = (t - times[i - 1]) / (times[i] - times[i - 1]);
      if (!(u < 1.0)) u = std::nextafter(1.0, 0.0);
      if (!(u > 0.0)) u = std::nextafter(0.0, 1.0);
      return {K::between, i - 1, u};
    }
  }
  return {K::after, times.size() - 1, 0.0};
}

/// Rotation angle between two unit quaternions via the rotation matrices:
/// angle of R_a^T R_b from its trace. Independent of the library's formula.
inline double rotation_angle_oracle(Quat a, Quat b) {
  auto mat = [](Quat q) {
    const Mat4 m = compose_trs({0, 0, 0}, q, {1, 1, 1});
    return m;
  };
  const Mat4 ra = mat(a), rb = mat(b);
  double trace = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) trace += ra(k, i) * rb(k, i);
  const double c = std::clamp((trace - 1.0) / 2.0, -1.0, 1.0);
  // acos is ill-conditioned near 0 and pi; use the skew part for the sine.
  double sx = 0.0, sy = 0.0, sz = 0.0;
  {
    double r[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        r[i][j] = 0.0;
        for (int k = 0; k < 3; ++k) r[i][j] += ra(k, i) * rb(k, j);
      }
    sx = r[2][1] - r[1][2];
    sy = r[0][2] - r[2][0];
    sz = r[1][0] - r[0][1];
  }
  const double s = 0.5 * std::sqrt(sx * sx + sy * sy + sz * sz);
  return std::atan2(s, c);
}

/// Brute-force bounding box over every sample and static position.
inline Aabb bbox_oracle(const std::vector<Trajectory>& trajs, const std::vector<StaticObjectSpec>& statics) {
  double lo[3] = {INFINITY, INFINITY, INFINITY}, hi[3] = {-INFINITY, -INFINITY, -INFINITY};
  auto add = [&](Vec3 p) {
    const double v[3] = {p.x, p.y, p.z};
    for (int i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], v[i]);
      hi[i] = std::max(hi[i], v[i]);
    }
  };
  for (const auto& t : trajs)
    for (const auto& s : t.samples) add(s.p);
  for (const auto& s : statics) add(s.p);
  return {{lo[0], lo[1], lo[2]}, {hi[0], hi[1], hi[2]}};
}

/// Distinct hue clusters (6-degree bins, adjacent bins merged) among saturated pixels that differ from the background.
inline std::size_t hue_census(const std::vector<std::uint8_t>& rgba, std::array<std::uint8_t, 4> background,
                              std::size_t min_pixels = 20) {
  std::vector<std::size_t> bins(60, 0);
  for (std::size_t i = 0; i + 3 < rgba.size(); i += 4) {
    const int r = rgba[i], g = rgba[i + 1], b = rgba[i + 2];
    if (r == background[0] && g == background[1] && b == background[2]) continue;
    const int mx = std::max({r, g, b}), mn = std::min({r, g, b});
    if (mx - mn < 40) continue;  // greys carry no hue
    double h;
    const double d = mx - mn;
    if (mx == r) h = std::fmod((g - b) / d + 6.0, 6.0);
    else if (mx == g) h = (b - r) / d + 2.0;
    else h = (r - g) / d + 4.0;
    ++bins[static_cast<std::size_t>(h * 10.0) % 60];
  }
  // Neighbouring occupied bins are one hue; count runs around the circle.
  std::size_t runs = 0, occupied = 0;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const bool here = bins[i] >= min_pixels;
    const bool prev = bins[(i + bins.size() - 1) % bins.size()] >= min_pixels;
    occupied += here;
    if (here && !prev) ++runs;
  }
  return occupied == bins.size() ? 1 : runs;
}

/// Lorenz reference solution: Boost.Odeint classical RK4 in long double at a
/// fine fixed step. Independent of the library's integrator.
inline std::array<long double, 3> lorenz_reference(Vec3 x0, double t_end, double step = 1e-5,
                                                   const LorenzParams& p = {}) {
  using State = std::array<long double, 3>;
  const long double sigma = p.sigma, rho = p.rho, beta = static_cast<long double>(8) / 3;
  State x{x0.x, x0.y, x0.z};
  auto rhs = [&](const State& s, State& d, long double) {
    d[0] = sigma * (s[1] - s[0]);
    d[1] = s[0] * (rho - s[2]) - s[1];
    d[2] = s[0] * s[1] - beta * s[2];
  };
  boost::numeric::odeint::runge_kutta4<State, long double> stepper;
  const auto n = static_cast<long>(std::llround(t_end / step));
  const long double h = static_cast<long double>(t_end) / n;
  for (long k = 0; k < n; ++k) stepper.do_step(rhs, x, h * k, h);
  return x;
}

/// Max-norm error of n library RK4 steps against the reference.
inline long double lorenz_rk4_error(Vec3 x0, double t_end, int n, const std::array<long double, 3>& ref) {
  const LorenzParams p;
  Vec3 s = x0;
  for (int k = 0; k < n; ++k) s = rk4_step(s, p, t_end / n);
  return std::max({std::abs(s.x - ref[0]), std::abs(s.y - ref[1]), std::abs(s.z - ref[2])});
}

}  // namespace fm_test
