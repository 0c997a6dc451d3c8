#include <gtest/gtest.h>

#include "support.hpp"

using namespace fm_test;

TEST(NormalizeQuaternion, ScalesToUnit) {
  EXPECT_EQ(normalize_quaternion({2, 0, 0, 0}), (Quat{1, 0, 0, 0}));
  EXPECT_EQ(normalize_quaternion({0, 0, 0, 2}), (Quat{0, 0, 0, 1}));
}

TEST(NormalizeQuaternion, KeepsNegativeScalar) {
  const Quat q = normalize_quaternion({-3, 0, 4, 0});
  EXPECT_DOUBLE_EQ(q.w, -0.6);
  EXPECT_DOUBLE_EQ(q.y, 0.8);
}

TEST(NormalizeQuaternion, RejectsTinyAndNonFinite) {
  try {
    normalize_quaternion({1e-13, 0, 0, 0});
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("1e-13"), std::string::npos) << e.what();
  }
  EXPECT_THROW(normalize_quaternion({NAN, 0, 0, 0}), ValidationError);
  EXPECT_THROW(normalize_quaternion({INFINITY, 0, 0, 0}), ValidationError);
}

TEST(NormalizeQuaternion, UnitNormOverWideMagnitudes) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10000; ++i) {
    const Quat dir = random_quat(rng);
    const double mag = std::pow(10.0, uniform(rng, -6.0, 6.0));
    const Quat q = normalize_quaternion({dir.w * mag, dir.x * mag, dir.y * mag, dir.z * mag});
    ASSERT_NEAR(norm(q), 1.0, 1e-9);
  }
}

TEST(NormalizeQuaternion, RotationUnchangedByPositiveScaling) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 2000; ++i) {
    const Quat q = random_quat(rng);
    const double k = std::pow(10.0, uniform(rng, -3.0, 3.0));
    const Vec3 v = random_vec(rng, -10.0, 10.0);
    const Vec3 a = rotate(q, v);
    const Vec3 b = rotate(normalize_quaternion({q.w * k, q.x * k, q.y * k, q.z * k}), v);
    ASSERT_NEAR(a.x, b.x, 1e-9);
    ASSERT_NEAR(a.y, b.y, 1e-9);
    ASSERT_NEAR(a.z, b.z, 1e-9);
  }
}

TEST(Math, RotateMatchesMatrix) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 1000; ++i) {
    const Quat q = random_quat(rng);
    const Vec3 v = random_vec(rng, -5.0, 5.0);
    const Vec3 a = rotate(q, v);
    const Vec3 b = transform_point(compose_trs({0, 0, 0}, q, {1, 1, 1}), v);
    ASSERT_NEAR(a.x, b.x, 1e-12);
    ASSERT_NEAR(a.y, b.y, 1e-12);
    ASSERT_NEAR(a.z, b.z, 1e-12);
  }
}

TEST(Math, YawPitchBuildsExpectedAxes) {
  const Quat q = quat_from_yaw_pitch(kPi / 2.0, 0.0);
  const Vec3 x = rotate(q, {1, 0, 0});
  EXPECT_NEAR(x.x, 0.0, 1e-15);
  EXPECT_NEAR(x.y, 1.0, 1e-15);
  EXPECT_NEAR(yaw_of(q), kPi / 2.0, 1e-15);
  // Positive pitch about +Y tips body X downward in a Z-up frame.
  const Vec3 pitched = rotate(quat_from_yaw_pitch(0.0, 0.3), {1, 0, 0});
  EXPECT_LT(pitched.z, 0.0);
}

TEST(Glyph, NamesAreCaseInsensitive) {
  EXPECT_EQ(parse_glyph_kind("CUBE"), GlyphKind::cube);
  EXPECT_EQ(parse_glyph_kind("Quadrotor"), GlyphKind::quadrotor);
  EXPECT_FALSE(parse_glyph_kind("pyramid").has_value());
  EXPECT_EQ(glyph_name_list(), "{sphere, cube, cylinder, cone, gate, quadrotor}");
  for (GlyphKind k : kAllGlyphKinds) EXPECT_EQ(parse_glyph_kind(glyph_name(k)), k);
}

TEST(SceneTimeRange, Examples) {
  std::vector<Trajectory> t{make_trajectory("a", line_samples({0, 0, 0}, {1, 0, 0}, 0.0, 5.0, 3)),
                            make_trajectory("b", line_samples({0, 0, 0}, {1, 0, 0}, 2.0, 9.0, 3))};
  EXPECT_EQ(scene_time_range(t, 0), (TimeRange{0.0, 9.0}));

  const double eps = std::nextafter(3.0, 4.0) - 3.0;
  std::vector<Trajectory> single{make_trajectory("a", line_samples({0, 0, 0}, {1, 0, 0}, 3.0, 3.0 + eps, 2))};
  EXPECT_EQ(scene_time_range(single, 0), (TimeRange{3.0, 3.0 + eps}));

  EXPECT_EQ(scene_time_range({}, 2), (TimeRange{0.0, 0.0}));
  EXPECT_THROW(scene_time_range({}, 0), ValidationError);
}

TEST(SceneBbox, Examples) {
  std::vector<StateSample> s(2);
  s[0].t = 0.0;
  s[1].t = 1.0;
  s[1].p = {1, 2, 3};
  std::vector<Trajectory> t{make_trajectory("a", s)};
  const Aabb box = scene_bbox(t, {});
  EXPECT_EQ(box.min, (Vec3{0, 0, 0}));
  EXPECT_EQ(box.max, (Vec3{1, 2, 3}));

  StaticObjectSpec obj;
  obj.p = {5, 5, 5};
  const std::vector<StaticObjectSpec> statics{obj};
  const Aabb one = scene_bbox({}, statics);
  EXPECT_EQ(one.min, (Vec3{5, 5, 5}));
  EXPECT_EQ(one.max, (Vec3{5, 5, 5}));

  EXPECT_THROW(scene_bbox({}, {}), ValidationError);
}

TEST(SceneBbox, MatchesBruteForce) {
  std::mt19937_64 rng(14);
  for (int round = 0; round < 50; ++round) {
    std::vector<Trajectory> trajs;
    const int n_traj = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n_traj; ++i) {
      auto samples = random_samples(rng, 1 + rng() % 200);
      for (auto& s : samples) s.p = random_vec(rng, 0.0, 1.0);
      trajs.push_back(make_trajectory("t" + std::to_string(i), samples));
    }
    std::vector<StaticObjectSpec> statics(rng() % 4);
    for (auto& s : statics) s.p = random_vec(rng, 0.0, 1.0);
    const Aabb got = scene_bbox(trajs, statics);
    const Aabb want = bbox_oracle(trajs, statics);
    ASSERT_EQ(got.min, want.min);
    ASSERT_EQ(got.max, want.max);
    ASSERT_GE(got.min.x, 0.0);
    ASSERT_LE(got.max.z, 1.0);
    for (const auto& t : trajs)
      for (const auto& s : t.samples) ASSERT_TRUE(got.contains(s.p));
  }
}

TEST(Scene, BuildValidates) {
  auto good = make_trajectory("a", line_samples({0, 0, 0}, {1, 1, 1}, 0.0, 1.0, 4));
  EXPECT_NO_THROW(Scene::build({good}, {}, minimal_config()));

  EXPECT_THROW(Scene::build({}, {}, minimal_config()), ValidationError);
  EXPECT_THROW(Scene::build({good, good}, {}, minimal_config()), ValidationError);

  auto bad_time = good;
  bad_time.samples[2].t = bad_time.samples[1].t;
  EXPECT_THROW(Scene::build({bad_time}, {}, minimal_config()), ValidationError);

  auto bad_quat = good;
  bad_quat.samples[0].q = {2, 0, 0, 0};
  EXPECT_THROW(Scene::build({bad_quat}, {}, minimal_config()), ValidationError);

  auto bad_scale = good;
  bad_scale.samples[0].s = {1, 0, 1};
  EXPECT_THROW(Scene::build({bad_scale}, {}, minimal_config()), ValidationError);

  auto bad_color = good;
  bad_color.samples[0].c = {1.5, 0, 0, 1};
  EXPECT_THROW(Scene::build({bad_color}, {}, minimal_config()), ValidationError);

  SceneConfig cfg = minimal_config();
  cfg.colors["nobody"] = {1, 0, 0, 1};
  EXPECT_THROW(Scene::build({good}, {}, cfg), ValidationError);
  cfg = minimal_config();
  cfg.follow_target = "nobody";
  EXPECT_THROW(Scene::build({good}, {}, cfg), ValidationError);
  cfg.follow_target = "a";
  EXPECT_NO_THROW(Scene::build({good}, {}, cfg));
}

TEST(Scene, DerivedQuantities) {
  std::mt19937_64 rng(15);
  std::vector<Trajectory> trajs{make_trajectory("x", random_samples(rng, 30, 1.0)),
                                make_trajectory("y", random_samples(rng, 10, -2.0))};
  const Scene scene = Scene::build(trajs, {}, minimal_config());
  EXPECT_EQ(scene.t_range().t0, -2.0);
  EXPECT_EQ(scene.t_range().t1, std::max(trajs[0].samples.back().t, trajs[1].samples.back().t));
  EXPECT_LE(scene.t_range().t0, scene.t_range().t1);
  EXPECT_EQ(scene.sample_count(), 40u);
  ASSERT_NE(scene.find("y"), nullptr);
  EXPECT_EQ(scene.find("y")->samples.size(), 10u);
  EXPECT_EQ(scene.find("z"), nullptr);
}
