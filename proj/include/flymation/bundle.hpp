#pragma once

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "flymation/error.hpp"
#include "flymation/ingest.hpp"
#include "flymation/io.hpp"
#include "flymation/model.hpp"
#include "flymation/timeline.hpp"

namespace flymation {

inline constexpr std::string_view kBundleVersion = "flymation-bundle/1";

/// Manifest (canonical JSON, sorted keys) plus one little-endian binary32 blob.
struct SceneBundle {
  std::string manifest;
  std::vector<std::uint8_t> blob;
};

namespace detail {

// Per-sample component counts, in blob order.
struct BundleArray {
  const char* name;
  std::size_t components;
};
inline constexpr std::array<BundleArray, 6> kBundleArrays{{{"times", 1},
                                                           {"positions", 3},
                                                           {"quats", 4},
                                                           {"velocities", 3},
                                                           {"colors", 4},
                                                           {"scales", 3}}};
inline constexpr std::size_t kFloatsPerSample = 18;

inline void put_f32(std::vector<std::uint8_t>& blob, double value) {
  const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(value));
  blob.push_back(static_cast<std::uint8_t>(bits & 0xffu));
  blob.push_back(static_cast<std::uint8_t>((bits >> 8) & 0xffu));
  blob.push_back(static_cast<std::uint8_t>((bits >> 16) & 0xffu));
  blob.push_back(static_cast<std::uint8_t>((bits >> 24) & 0xffu));
}

inline double get_f32(std::span<const std::uint8_t> blob, std::size_t offset) {
  const std::uint32_t bits = static_cast<std::uint32_t>(blob[offset]) |
                             (static_cast<std::uint32_t>(blob[offset + 1]) << 8) |
                             (static_cast<std::uint32_t>(blob[offset + 2]) << 16) |
                             (static_cast<std::uint32_t>(blob[offset + 3]) << 24);
  return static_cast<double>(std::bit_cast<float>(bits));
}

inline nlohmann::json vec_json(Vec3 v) { return nlohmann::json::array({v.x, v.y, v.z}); }
inline nlohmann::json quat_json(Quat q) { return nlohmann::json::array({q.w, q.x, q.y, q.z}); }

[[noreturn]] inline void bundle_malformed(const std::string& what) {
  throw BundleError(BundleError::Kind::malformed, "malformed bundle manifest: " + what);
}

inline const nlohmann::json& member(const nlohmann::json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) bundle_malformed(std::string("missing '") + key + "'");
  return obj.at(key);
}

inline double member_number(const nlohmann::json& obj, const char* key) {
  const auto& v = member(obj, key);
  if (!v.is_number()) bundle_malformed(std::string("'") + key + "' is not a number");
  return v.get<double>();
}

inline std::uint64_t member_uint(const nlohmann::json& obj, const char* key) {
  const auto& v = member(obj, key);
  if (!v.is_number_unsigned())
    bundle_malformed(std::string("'") + key + "' is not a non-negative integer");
  return v.get<std::uint64_t>();
}

inline std::vector<double> number_array(const nlohmann::json& v, std::size_t n, const char* what) {
  if (!v.is_array() || v.size() != n) bundle_malformed(std::string("'") + what + "' has wrong shape");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) bundle_malformed(std::string("'") + what + "' holds a non-number");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace detail

/// Packs every trajectory's samples as binary32 arrays; statics and the config
/// travel inline in the manifest.
inline SceneBundle serialize_bundle(const Scene& scene) {
  using nlohmann::json;
  SceneBundle bundle;
  bundle.blob.reserve(scene.sample_count() * detail::kFloatsPerSample * 4);

  json trajectories = json::array();
  for (const Trajectory& traj : scene.trajectories()) {
    const auto& s = traj.samples;
    json offsets = json::object();
    offsets["times"] = bundle.blob.size();
    for (const StateSample& k : s) detail::put_f32(bundle.blob, k.t);
    offsets["positions"] = bundle.blob.size();
    for (const StateSample& k : s)
      for (double v : {k.p.x, k.p.y, k.p.z}) detail::put_f32(bundle.blob, v);
    offsets["quats"] = bundle.blob.size();
    for (const StateSample& k : s)
      for (double v : {k.q.w, k.q.x, k.q.y, k.q.z}) detail::put_f32(bundle.blob, v);
    offsets["velocities"] = bundle.blob.size();
    for (const StateSample& k : s)
      for (double v : {k.v.x, k.v.y, k.v.z}) detail::put_f32(bundle.blob, v);
    offsets["colors"] = bundle.blob.size();
    for (const StateSample& k : s)
      for (double v : {k.c.r, k.c.g, k.c.b, k.c.a}) detail::put_f32(bundle.blob, v);
    offsets["scales"] = bundle.blob.size();
    for (const StateSample& k : s)
      for (double v : {k.s.x, k.s.y, k.s.z}) detail::put_f32(bundle.blob, v);

    json entry = json::object();
    entry["id"] = traj.id;
    entry["kind"] = std::string(kind_name(traj.kind));
    entry["glyph"] = std::string(glyph_name(traj.glyph));
    entry["color"] = traj.color_override ? detail::color_json(*traj.color_override) : json(nullptr);
    entry["sample_count"] = s.size();
    entry["offsets"] = offsets;
    trajectories.push_back(entry);
  }

  json statics = json::array();
  for (const StaticObjectSpec& o : scene.statics()) {
    statics.push_back({{"p", detail::vec_json(o.p)},
                       {"q", detail::quat_json(o.q)},
                       {"c", detail::color_json(o.c)},
                       {"s", detail::vec_json(o.s)},
                       {"obj", std::string(glyph_name(o.obj))}});
  }

  json manifest = json::object();
  manifest["version"] = std::string(kBundleVersion);
  manifest["t_range"] = json::array({scene.t_range().t0, scene.t_range().t1});
  manifest["bbox"] = {{"min", detail::vec_json(scene.bbox().min)},
                      {"max", detail::vec_json(scene.bbox().max)}};
  manifest["blob_bytes"] = bundle.blob.size();
  manifest["trajectories"] = trajectories;
  manifest["statics"] = statics;
  manifest["config"] = scene_config_json(scene.config());
  bundle.manifest = manifest.dump();
  return bundle;
}

/// Rebuilds a scene from a bundle. Every offset and length is checked before
/// any array is read, and the result passes full scene validation.
inline Scene deserialize_bundle(std::string_view manifest_text, std::span<const std::uint8_t> blob) {
  using nlohmann::json;
  using K = BundleError::Kind;
  json manifest;
  try {
    manifest = json::parse(manifest_text);
  } catch (const json::parse_error& e) {
    throw BundleError(K::malformed, std::string("malformed bundle manifest: ") + e.what());
  }
  const auto& version = detail::member(manifest, "version");
  if (!version.is_string() || version.get<std::string>() != kBundleVersion)
    throw BundleError(K::version, "unsupported bundle version " + version.dump() + ", expected \"" +
                                      std::string(kBundleVersion) + "\"");
  const std::uint64_t blob_bytes = detail::member_uint(manifest, "blob_bytes");
  if (blob.size() < blob_bytes)
    throw BundleError(K::truncated, "truncated buffer: blob has " + std::to_string(blob.size()) +
                                        " bytes, manifest declares " + std::to_string(blob_bytes));
  if (blob.size() > blob_bytes)
    throw BundleError(K::malformed, "blob has " + std::to_string(blob.size() - blob_bytes) +
                                        " trailing bytes beyond the declared size");

  const auto& trajs_json = detail::member(manifest, "trajectories");
  if (!trajs_json.is_array()) detail::bundle_malformed("'trajectories' is not an array");
  std::vector<Trajectory> trajectories;
  for (const auto& entry : trajs_json) {
    Trajectory traj;
    const auto& id = detail::member(entry, "id");
    if (!id.is_string()) detail::bundle_malformed("trajectory id is not a string");
    traj.id = id.get<std::string>();
    const auto& kind = detail::member(entry, "kind");
    if (kind == "vehicle") traj.kind = TrajectoryKind::vehicle;
    else if (kind == "dynamic") traj.kind = TrajectoryKind::dynamic;
    else detail::bundle_malformed("unknown trajectory kind " + kind.dump());
    const auto& glyph = detail::member(entry, "glyph");
    const auto g = glyph.is_string() ? parse_glyph_kind(glyph.get<std::string>()) : std::nullopt;
    if (!g) detail::bundle_malformed("unknown glyph " + glyph.dump());
    traj.glyph = *g;
    const auto& color = detail::member(entry, "color");
    if (!color.is_null()) {
      const auto c = detail::number_array(color, 4, "color");
      traj.color_override = Color{c[0], c[1], c[2], c[3]};
    }
    const std::uint64_t n = detail::member_uint(entry, "sample_count");
    const auto& offsets = detail::member(entry, "offsets");

    std::array<std::uint64_t, detail::kBundleArrays.size()> base{};
    for (std::size_t a = 0; a < detail::kBundleArrays.size(); ++a) {
      const auto& arr = detail::kBundleArrays[a];
      base[a] = detail::member_uint(offsets, arr.name);
      const std::uint64_t bytes = n * arr.components * 4;
      if (base[a] % 4 != 0)
        throw BundleError(K::out_of_bounds, traj.id + "." + arr.name + ": offset not 4-byte aligned");
      if (n > blob_bytes || base[a] > blob_bytes || bytes > blob_bytes - base[a])
        throw BundleError(K::out_of_bounds, "offset out of bounds: " + traj.id + "." + arr.name +
                                                " [" + std::to_string(base[a]) + ", +" +
                                                std::to_string(bytes) + ") exceeds blob of " +
                                                std::to_string(blob_bytes) + " bytes");
    }

    traj.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      StateSample& s = traj.samples[i];
      auto f = [&](std::size_t a, std::size_t comp) {
        return detail::get_f32(blob, base[a] + (i * detail::kBundleArrays[a].components + comp) * 4);
      };
      s.t = f(0, 0);
      s.p = {f(1, 0), f(1, 1), f(1, 2)};
      s.q = normalize_quaternion({f(2, 0), f(2, 1), f(2, 2), f(2, 3)});
      s.v = {f(3, 0), f(3, 1), f(3, 2)};
      s.c = {f(4, 0), f(4, 1), f(4, 2), f(4, 3)};
      s.s = {f(5, 0), f(5, 1), f(5, 2)};
    }
    trajectories.push_back(std::move(traj));
  }

  std::vector<StaticObjectSpec> statics;
  const auto& statics_json = detail::member(manifest, "statics");
  if (!statics_json.is_array()) detail::bundle_malformed("'statics' is not an array");
  for (const auto& entry : statics_json) {
    StaticObjectSpec o;
    const auto p = detail::number_array(detail::member(entry, "p"), 3, "p");
    const auto q = detail::number_array(detail::member(entry, "q"), 4, "q");
    const auto c = detail::number_array(detail::member(entry, "c"), 4, "c");
    const auto s = detail::number_array(detail::member(entry, "s"), 3, "s");
    const auto& obj = detail::member(entry, "obj");
    const auto g = obj.is_string() ? parse_glyph_kind(obj.get<std::string>()) : std::nullopt;
    if (!g) detail::bundle_malformed("unknown static obj " + obj.dump());
    o.p = {p[0], p[1], p[2]};
    o.q = {q[0], q[1], q[2], q[3]};
    o.c = {c[0], c[1], c[2], c[3]};
    o.s = {s[0], s[1], s[2]};
    o.obj = *g;
    statics.push_back(o);
  }

  SceneConfig config = parse_scene_config(detail::member(manifest, "config").dump());
  return Scene::build(std::move(trajectories), std::move(statics), std::move(config));
}

inline Scene deserialize_bundle(const SceneBundle& bundle) {
  return deserialize_bundle(bundle.manifest, bundle.blob);
}

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kBlobFile = "blob.bin";

/// Writes manifest.json and blob.bin into dir (created if needed).
inline void write_bundle(const SceneBundle& bundle, const std::filesystem::path& dir) {
  ensure_directory(dir);
  write_text_file(dir / kManifestFile, bundle.manifest);
  write_bytes(dir / kBlobFile, std::span(reinterpret_cast<const char*>(bundle.blob.data()),
                                         bundle.blob.size()));
}

inline SceneBundle read_bundle(const std::filesystem::path& dir) {
  SceneBundle bundle;
  bundle.manifest = read_text_file(dir / kManifestFile);
  const std::string blob = read_text_file(dir / kBlobFile);
  bundle.blob.assign(blob.begin(), blob.end());
  return bundle;
}

// --- golden vectors ------------------------------------------------------------------

inline constexpr std::string_view kGoldenHeader =
    "id,t,visible,px,py,pz,qw,qx,qy,qz,vx,vy,vz,cr,cg,cb,ca,sx,sy,sz";

namespace detail {

inline void append_sig9(std::string& out, double value) {
  std::array<char, 40> buf{};
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 9);
  (void)ec;
  out.append(buf.data(), ptr);
}

}  // namespace detail

/// One line per (trajectory, query time) with the sampled pose at 9
/// significant digits. Hidden poses carry only id, t and visible=0.
inline std::string export_goldens(const Scene& scene, std::span<const double> query_times) {
  std::string out(kGoldenHeader);
  out += '\n';
  for (const Trajectory& traj : scene.trajectories()) {
    for (double t : query_times) {
      const PoseSample pose = sample_trajectory(traj, t);
      out += traj.id;
      out += ',';
      detail::append_sig9(out, t);
      if (!pose.visible) {
        out += ",0\n";
        continue;
      }
      out += ",1";
      const std::array<double, 16> row{pose.p.x, pose.p.y, pose.p.z, pose.q.w, pose.q.x, pose.q.y,
                                       pose.q.z, pose.v.x, pose.v.y, pose.v.z, pose.c.r, pose.c.g,
                                       pose.c.b, pose.c.a, pose.s.x, pose.s.y};
      for (double v : row) {
        out += ',';
        detail::append_sig9(out, v);
      }
      out += ',';
      detail::append_sig9(out, pose.s.z);
      out += '\n';
    }
  }
  return out;
}

/// Default golden query grid: `count` evenly spaced instants over the range.
inline std::vector<double> golden_query_times(TimeRange range, std::size_t count = 101) {
  if (count < 2 || range.length() <= 0.0) return {range.t0};
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k)
    out[k] = range.t0 + range.length() * static_cast<double>(k) / static_cast<double>(count - 1);
  out.back() = range.t1;
  return out;
}

}  // namespace flymation
