#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "support.hpp"

using namespace fm_test;

namespace {

Scene random_scene(std::mt19937_64& rng, std::size_t n_traj) {
  std::vector<Trajectory> trajs;
  for (std::size_t i = 0; i < n_traj; ++i) {
    auto t = make_trajectory("traj_" + std::to_string(i), random_samples(rng, 1 + rng() % 300, uniform(rng, 0, 5)),
                             kAllGlyphKinds[i % kAllGlyphKinds.size()]);
    t.kind = i % 2 ? TrajectoryKind::dynamic : TrajectoryKind::vehicle;
    if (i % 3 == 0) t.color_override = Color{0.25, 0.5, 0.75, 1.0};
    trajs.push_back(std::move(t));
  }
  StaticObjectSpec s;
  s.p = {1, 2, 3};
  s.obj = GlyphKind::cone;
  return Scene::build(trajs, {s}, minimal_config());
}

// The volatile store forces the narrowing: GCC 11's SLP vectorizer at -O3
// drops a plain double->float->double pair across neighbouring calls.
double as_f32(double v) {
  volatile float f = static_cast<float>(v);
  return static_cast<double>(f);
}

BundleError::Kind error_kind(const std::string& manifest, const std::vector<std::uint8_t>& blob) {
  try {
    deserialize_bundle(manifest, blob);
  } catch (const BundleError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected BundleError";
  return BundleError::Kind::malformed;
}

}  // namespace

TEST(Bundle, RoundTripRoundsToBinary32) {
  std::mt19937_64 rng(71);
  for (int round = 0; round < 20; ++round) {
    const Scene scene = random_scene(rng, 1 + rng() % 6);
    const SceneBundle bundle = serialize_bundle(scene);
    EXPECT_EQ(bundle.blob.size(), scene.sample_count() * 18 * 4);
    const Scene back = deserialize_bundle(bundle);
    ASSERT_EQ(back.trajectories().size(), scene.trajectories().size());
    for (std::size_t i = 0; i < scene.trajectories().size(); ++i) {
      const Trajectory& a = scene.trajectories()[i];
      const Trajectory& b = back.trajectories()[i];
      ASSERT_EQ(a.id, b.id);
      ASSERT_EQ(a.kind, b.kind);
      ASSERT_EQ(a.glyph, b.glyph);
      ASSERT_EQ(a.color_override, b.color_override);
      ASSERT_EQ(a.samples.size(), b.samples.size());
      for (std::size_t k = 0; k < a.samples.size(); ++k) {
        const StateSample &x = a.samples[k], &y = b.samples[k];
        ASSERT_EQ(y.t, as_f32(x.t));
        ASSERT_EQ(y.p, (Vec3{as_f32(x.p.x), as_f32(x.p.y), as_f32(x.p.z)}));
        ASSERT_EQ(y.v, (Vec3{as_f32(x.v.x), as_f32(x.v.y), as_f32(x.v.z)}));
        ASSERT_EQ(y.c, (Color{as_f32(x.c.r), as_f32(x.c.g), as_f32(x.c.b), as_f32(x.c.a)}));
        ASSERT_LT(rotation_angle_oracle(x.q, y.q), 1e-6);
      }
    }
    EXPECT_EQ(back.statics(), scene.statics());
    EXPECT_EQ(back.config(), scene.config());
  }
}

TEST(Bundle, ManifestShape) {
  std::mt19937_64 rng(72);
  const Scene scene = random_scene(rng, 3);
  const SceneBundle bundle = serialize_bundle(scene);
  const auto m = nlohmann::json::parse(bundle.manifest);
  EXPECT_EQ(m["version"], "flymation-bundle/1");
  EXPECT_EQ(m["blob_bytes"], bundle.blob.size());
  EXPECT_EQ(m["trajectories"].size(), 3u);
  EXPECT_EQ(m["trajectories"][0]["offsets"]["times"], 0);
  const std::size_t n0 = m["trajectories"][0]["sample_count"];
  EXPECT_EQ(m["trajectories"][0]["offsets"]["positions"], n0 * 4);
  EXPECT_EQ(m["trajectories"][1]["offsets"]["times"], n0 * 18 * 4);
  EXPECT_EQ(m["t_range"][0], scene.t_range().t0);
  // Canonical: re-dumping the parsed manifest gives identical text.
  EXPECT_EQ(m.dump(), bundle.manifest);
}

TEST(Bundle, LittleEndianFloats) {
  const Scene scene = Scene::build({make_trajectory("a", line_samples({0, 0, 0}, {1, 0, 0}, 1.0, 2.0, 2))}, {},
                                   minimal_config());
  const SceneBundle bundle = serialize_bundle(scene);
  // First float is t = 1.0f = 0x3f800000.
  EXPECT_EQ(bundle.blob[0], 0x00);
  EXPECT_EQ(bundle.blob[1], 0x00);
  EXPECT_EQ(bundle.blob[2], 0x80);
  EXPECT_EQ(bundle.blob[3], 0x3f);
}

TEST(Bundle, Deterministic) {
  std::mt19937_64 a(73), b(73);
  const SceneBundle x = serialize_bundle(random_scene(a, 4));
  const SceneBundle y = serialize_bundle(random_scene(b, 4));
  EXPECT_EQ(x.manifest, y.manifest);
  EXPECT_EQ(x.blob, y.blob);
}

TEST(Bundle, Errors) {
  std::mt19937_64 rng(74);
  const SceneBundle bundle = serialize_bundle(random_scene(rng, 2));
  using K = BundleError::Kind;

  auto truncated = bundle.blob;
  truncated.resize(truncated.size() - 4);
  EXPECT_EQ(error_kind(bundle.manifest, truncated), K::truncated);

  auto extra = bundle.blob;
  extra.push_back(0);
  EXPECT_EQ(error_kind(bundle.manifest, extra), K::malformed);

  auto m = nlohmann::json::parse(bundle.manifest);
  m["version"] = "flymation-bundle/2";
  EXPECT_EQ(error_kind(m.dump(), bundle.blob), K::version);

  m = nlohmann::json::parse(bundle.manifest);
  m["trajectories"][1]["offsets"]["scales"] = bundle.blob.size();
  EXPECT_EQ(error_kind(m.dump(), bundle.blob), K::out_of_bounds);

  m = nlohmann::json::parse(bundle.manifest);
  m["trajectories"][0]["sample_count"] = std::uint64_t{1} << 62;
  EXPECT_EQ(error_kind(m.dump(), bundle.blob), K::out_of_bounds);

  m = nlohmann::json::parse(bundle.manifest);
  m["trajectories"][0]["offsets"]["quats"] = 2;
  EXPECT_EQ(error_kind(m.dump(), bundle.blob), K::out_of_bounds);

  EXPECT_EQ(error_kind("{not json", bundle.blob), K::malformed);
  m = nlohmann::json::parse(bundle.manifest);
  m.erase("statics");
  EXPECT_EQ(error_kind(m.dump(), bundle.blob), K::malformed);
  m = nlohmann::json::parse(bundle.manifest);
  m["trajectories"][0]["glyph"] = "blimp";
  EXPECT_EQ(error_kind(m.dump(), bundle.blob), K::malformed);
}

TEST(Bundle, WriteReadDirectory) {
  std::mt19937_64 rng(75);
  const SceneBundle bundle = serialize_bundle(random_scene(rng, 2));
  TempDir dir("bundle");
  write_bundle(bundle, dir / "out");
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / kManifestFile));
  const SceneBundle back = read_bundle(dir / "out");
  EXPECT_EQ(back.manifest, bundle.manifest);
  EXPECT_EQ(back.blob, bundle.blob);
  EXPECT_THROW(read_bundle(dir / "missing"), IoError);
}

TEST(Goldens, QueryTimes) {
  const auto t = golden_query_times({0.0, 10.0});
  ASSERT_EQ(t.size(), 101u);
  EXPECT_EQ(t.front(), 0.0);
  EXPECT_EQ(t[50], 5.0);
  EXPECT_EQ(t.back(), 10.0);
  EXPECT_EQ(golden_query_times({3.0, 3.0}), std::vector<double>{3.0});
}

TEST(Goldens, FormatAndValues) {
  std::vector<Trajectory> trajs{make_trajectory("a", line_samples({0, 0, 0}, {3, 0, 0}, 1.0, 4.0, 4, {1, 0.5, 0, 1}))};
  const Scene scene = Scene::build(trajs, {}, minimal_config());
  const std::vector<double> times{0.0, 1.0, 2.5, 5.0};
  const std::string csv = export_goldens(scene, times);
  std::vector<std::string> lines;
  std::size_t start = 0;
  for (std::size_t nl; (nl = csv.find('\n', start)) != std::string::npos; start = nl + 1)
    lines.push_back(csv.substr(start, nl - start));
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0], "id,t,visible,px,py,pz,qw,qx,qy,qz,vx,vy,vz,cr,cg,cb,ca,sx,sy,sz");
  EXPECT_EQ(lines[1], "a,0,0");
  EXPECT_EQ(lines[2], "a,1,1,0,0,0,1,0,0,0,1,0,0,1,0.5,0,1,1,1,1");
  EXPECT_EQ(lines[3], "a,2.5,1,1.5,0,0,1,0,0,0,1,0,0,1,0.5,0,1,1,1,1");
  EXPECT_EQ(lines[4], "a,5,0");
}

TEST(Goldens, NineSignificantDigitsParseBack) {
  std::mt19937_64 rng(76);
  const Scene scene = random_scene(rng, 3);
  const auto times = golden_query_times(scene.t_range(), 37);
  const std::string csv = export_goldens(scene, times);
  std::size_t start = csv.find('\n') + 1;
  std::size_t rows = 0;
  for (std::size_t nl; (nl = csv.find('\n', start)) != std::string::npos; start = nl + 1, ++rows) {
    const std::string line = csv.substr(start, nl - start);
    std::vector<std::string> f;
    std::size_t a = 0;
    for (std::size_t c; (c = line.find(',', a)) != std::string::npos; a = c + 1) f.push_back(line.substr(a, c - a));
    f.push_back(line.substr(a));
    ASSERT_TRUE(f.size() == 3 || f.size() == 20) << line;
    const Trajectory* traj = scene.find(f[0]);
    ASSERT_NE(traj, nullptr);
    const double t = times[rows % times.size()];
    ASSERT_NEAR(std::stod(f[1]), t, 1e-8 * (1.0 + std::abs(t)));
    const PoseSample pose = sample_trajectory(*traj, t);
    ASSERT_EQ(f[2], pose.visible ? "1" : "0");
    if (!pose.visible) continue;
    ASSERT_NEAR(std::stod(f[3]), pose.p.x, 1e-8 * (1.0 + std::abs(pose.p.x)));
    ASSERT_NEAR(std::stod(f[6]), pose.q.w, 1e-8);
  }
  EXPECT_EQ(rows, 3u * 37u);
}
