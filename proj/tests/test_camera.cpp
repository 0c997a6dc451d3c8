#include <gtest/gtest.h>

#include "support.hpp"

using namespace fm_test;

namespace {

// Textbook view basis, written out independently.
struct Basis {
  Vec3 right, up, back;
};

Basis basis_of(const Mat4& v) {
  return {{v(0, 0), v(0, 1), v(0, 2)}, {v(1, 0), v(1, 1), v(1, 2)}, {v(2, 0), v(2, 1), v(2, 2)}};
}

OrbitState random_orbit(std::mt19937_64& rng) {
  OrbitState s;
  s.pivot = random_vec(rng, -100, 100);
  s.radius = std::pow(10.0, uniform(rng, -1.0, 4.0));
  s.azimuth = uniform(rng, -kPi, kPi);
  s.elevation = uniform(rng, -kOrbitMaxElevation, kOrbitMaxElevation);
  return s;
}

}  // namespace

TEST(LookAt, OrthonormalAndRightHanded) {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 10000; ++i) {
    const Vec3 eye = random_vec(rng, -100, 100);
    Vec3 target = random_vec(rng, -100, 100);
    if (i % 100 == 0) target = eye + Vec3{0, 0, uniform(rng, -5, 5) + 6.0};  // straight up or down
    const Mat4 v = look_at(eye, target, {0, 0, 1});
    const Basis b = basis_of(v);
    ASSERT_NEAR(dot(b.right, b.right), 1.0, 1e-9);
    ASSERT_NEAR(dot(b.up, b.up), 1.0, 1e-9);
    ASSERT_NEAR(dot(b.back, b.back), 1.0, 1e-9);
    ASSERT_NEAR(dot(b.right, b.up), 0.0, 1e-9);
    ASSERT_NEAR(dot(b.right, b.back), 0.0, 1e-9);
    ASSERT_NEAR(dot(b.up, b.back), 0.0, 1e-9);
    const Vec3 c = cross(b.right, b.up);
    ASSERT_NEAR(dot(c, b.back), 1.0, 1e-9);
    // The eye maps to the origin and the target lies on -Z.
    const Vec4 e = v * Vec4{eye.x, eye.y, eye.z, 1.0};
    ASSERT_NEAR(norm(Vec3{e.x, e.y, e.z}), 0.0, 1e-9 * (1.0 + norm(eye)));
    const Vec4 t = v * Vec4{target.x, target.y, target.z, 1.0};
    ASSERT_LT(t.z, 0.0);
    ASSERT_NEAR(t.x, 0.0, 1e-9 * (1.0 + norm(eye) + norm(target)));
    ASSERT_NEAR(t.y, 0.0, 1e-9 * (1.0 + norm(eye) + norm(target)));
  }
  EXPECT_THROW(look_at({1, 2, 3}, {1, 2, 3}, {0, 0, 1}), ValidationError);
}

TEST(LookAt, UpStaysAboveHorizon) {
  const Mat4 v = look_at({10, 0, 5}, {0, 0, 0}, {0, 0, 1});
  EXPECT_GT(basis_of(v).up.z, 0.0);
}

TEST(Perspective, MatchesHandDerivedEntries) {
  const Mat4 p = perspective(kPi / 2.0, 2.0, 1.0, 3.0);
  EXPECT_NEAR(p(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(p(1, 1), 1.0, 1e-15);
  EXPECT_NEAR(p(2, 2), -2.0, 1e-15);
  EXPECT_NEAR(p(2, 3), -3.0, 1e-15);
  EXPECT_EQ(p(3, 2), -1.0);
  EXPECT_EQ(p(3, 3), 0.0);
  // Points on the near and far planes land on NDC -1 and +1.
  for (double z : {-1.0, -3.0}) {
    const Vec4 c = p * Vec4{0, 0, z, 1};
    EXPECT_NEAR(c.z / c.w, z == -1.0 ? -1.0 : 1.0, 1e-12);
  }
  EXPECT_THROW(perspective(0.0, 1.0, 1.0, 2.0), ValidationError);
  EXPECT_THROW(perspective(1.0, 0.0, 1.0, 2.0), ValidationError);
  EXPECT_THROW(perspective(1.0, 1.0, 0.0, 2.0), ValidationError);
  EXPECT_THROW(perspective(1.0, 1.0, 2.0, 2.0), ValidationError);
}

TEST(Project, MatchesPinholeOracle) {
  std::mt19937_64 rng(52);
  for (int i = 0; i < 2000; ++i) {
    const int w = 100 + static_cast<int>(rng() % 1900), h = 100 + static_cast<int>(rng() % 1000);
    const OrbitState s = random_orbit(rng);
    const CameraMatrices cam = orbit_camera(s, w, h);
    const Basis b = basis_of(cam.view);
    const Vec3 eye = orbit_eye(s);
    const Vec3 p = s.pivot + random_vec(rng, -s.radius * 0.3, s.radius * 0.3);
    // Pinhole model: focal length in pixels from the vertical field of view.
    const Vec3 d = p - eye;
    const double xc = dot(d, b.right), yc = dot(d, b.up), zc = -dot(d, b.back);
    const double focal = 0.5 * h / std::tan(0.5 * kDefaultFovY);
    const double px = 0.5 * w + focal * xc / zc;
    const double py = 0.5 * h - focal * yc / zc;
    const Projection pr = project(p, cam);
    ASSERT_TRUE(pr.in_front);
    ASSERT_NEAR(pr.x, px, 1e-6 * (1.0 + std::abs(px)));
    ASSERT_NEAR(pr.y, py, 1e-6 * (1.0 + std::abs(py)));
  }
}

TEST(Orbit, TargetProjectsToCenter) {
  std::mt19937_64 rng(53);
  for (int i = 0; i < 10000; ++i) {
    const int w = 1 + static_cast<int>(rng() % 4000), h = 1 + static_cast<int>(rng() % 4000);
    const OrbitState s = random_orbit(rng);
    const Projection pr = project(s.pivot, orbit_camera(s, w, h));
    ASSERT_TRUE(pr.in_front);
    ASSERT_NEAR(pr.x, 0.5 * w, 1e-6);
    ASSERT_NEAR(pr.y, 0.5 * h, 1e-6);
  }
}

TEST(Orbit, DragKeepsRadiusAndClampsElevation) {
  std::mt19937_64 rng(54);
  for (int i = 0; i < 10000; ++i) {
    OrbitState s = random_orbit(rng);
    const double r = s.radius;
    for (int k = 0; k < 5; ++k) {
      s = orbit_update(s, uniform(rng, -2000, 2000), uniform(rng, -2000, 2000), 0);
      ASSERT_EQ(s.radius, r);
      ASSERT_LE(std::abs(s.elevation), kOrbitMaxElevation);
      ASSERT_NEAR(norm(orbit_eye(s) - s.pivot), r, 1e-9 * r);
    }
  }
}

TEST(Orbit, DragAndZoomSteps) {
  OrbitState s;
  s.radius = 10.0;
  s = orbit_update(s, 100.0, 0.0, 0);
  EXPECT_NEAR(s.azimuth, 0.5, 1e-15);
  s = orbit_update(s, 0.0, 100.0, 0);
  EXPECT_NEAR(s.elevation, -0.5, 1e-15);
  s = orbit_update(s, 0.0, -1e6, 0);
  EXPECT_EQ(s.elevation, kOrbitMaxElevation);
  s = orbit_update(s, 0.0, 0.0, 2);
  EXPECT_NEAR(s.radius, 8.1, 1e-12);
  s = orbit_update(s, 0.0, 0.0, -2);
  EXPECT_NEAR(s.radius, 10.0, 1e-12);
  s = orbit_update(s, 0.0, 0.0, 1000);
  EXPECT_EQ(s.radius, kOrbitMinRadius);
  s = orbit_update(s, 0.0, 0.0, -1000);
  EXPECT_EQ(s.radius, kOrbitMaxRadius);
}

TEST(FrameBbox, Defaults) {
  const Aabb box{{0, 0, 0}, {2, 4, 4}};
  const OrbitState s = frame_bbox(box);
  EXPECT_EQ(s.pivot, (Vec3{1, 2, 2}));
  EXPECT_NEAR(s.radius, 1.8 * 3.0, 1e-12);
  EXPECT_NEAR(s.azimuth, kPi / 4.0, 1e-15);
  EXPECT_NEAR(s.elevation, kPi / 6.0, 1e-15);
  EXPECT_EQ(frame_bbox({{5, 5, 5}, {5, 5, 5}}).radius, 1.0);
}

TEST(FrameBbox, BoxCornersInFront) {
  std::mt19937_64 rng(55);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 a = random_vec(rng, -100, 100), b = random_vec(rng, -100, 100);
    const Aabb box{{std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)},
                   {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)}};
    const CameraMatrices cam = orbit_camera(frame_bbox(box), 800, 600);
    for (int k = 0; k < 8; ++k) {
      const Vec3 corner{(k & 1) ? box.max.x : box.min.x, (k & 2) ? box.max.y : box.min.y,
                        (k & 4) ? box.max.z : box.min.z};
      const Projection pr = project(corner, cam);
      ASSERT_TRUE(pr.in_front);
      ASSERT_GT(pr.depth, -1.0);
      ASSERT_LT(pr.depth, 1.0);
    }
  }
}

TEST(Follow, SnapsThenSmooths) {
  PoseSample v;
  v.visible = true;
  v.p = {10, 0, 3};
  v.v = {0, 4, 0};
  FollowState st;
  FollowResult r = follow_pose(st, v, 0.0);
  EXPECT_EQ(r.target, v.p);
  EXPECT_EQ(r.eye, (Vec3{10, -5, 5}));

  // Exponential approach: after dt = tau the gap shrinks by exactly e^-1.
  PoseSample moved = v;
  moved.p = {10, 10, 3};
  const FollowResult next = follow_pose(r.state, moved, 0.3);
  const double k = 1.0 - std::exp(-1.0);
  EXPECT_NEAR(next.target.y, 10.0 * k, 1e-12);
  EXPECT_NEAR(next.eye.y, -5.0 + 10.0 * k, 1e-12);

  PoseSample hidden = v;
  hidden.visible = false;
  EXPECT_THROW(follow_pose(st, hidden, 0.1), ValidationError);
}

TEST(Follow, SlowVehicleUsesBodyYaw) {
  PoseSample v;
  v.visible = true;
  v.q = quat_from_yaw_pitch(kPi / 2.0, 0.0);
  v.v = {0.05, 0.0, 0.0};
  const Vec3 h = follow_heading(v);
  EXPECT_NEAR(h.x, 0.0, 1e-15);
  EXPECT_NEAR(h.y, 1.0, 1e-15);
}

TEST(Follow, SmoothingIndependentOfStepCount) {
  PoseSample v;
  v.visible = true;
  v.p = {0, 0, 0};
  v.v = {1, 0, 0};
  FollowState st = follow_pose({}, v, 0.0).state;
  v.p = {20, 0, 0};
  FollowState one = follow_pose(st, v, 0.9).state;
  FollowState many = st;
  for (int i = 0; i < 90; ++i) many = follow_pose(many, v, 0.01).state;
  EXPECT_NEAR(one.target_smoothed.x, many.target_smoothed.x, 1e-9);
  EXPECT_NEAR(one.eye_smoothed.x, many.eye_smoothed.x, 1e-9);
}
