#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "flymation/error.hpp"
#include "flymation/io.hpp"
#include "flymation/model.hpp"

namespace flymation {

inline constexpr std::string_view kStateHeader =
    "t,px,py,pz,qw,qx,qy,qz,vx,vy,vz,cr,cg,cb,ca,sx,sy,sz";
inline constexpr std::string_view kStaticHeader = "px,py,pz,qw,qx,qy,qz,cr,cg,cb,ca,sx,sy,sz,obj";

struct IngestWarning {
  std::string source;
  std::size_t line = 0;
  std::string message;
};

struct IngestReport {
  std::size_t files_read = 0;
  std::size_t rows_read = 0;
  std::vector<IngestWarning> warnings;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  auto blank = [](char c) { return c == ' ' || c == '\t'; };
  while (!s.empty() && blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && blank(s.back())) s.remove_suffix(1);
  return s;
}

/// Iterates physical lines (LF or CRLF), skipping blank and '#' comment lines.
class CsvLines {
 public:
  explicit CsvLines(std::string_view text) : text_(text) {}

  /// Next meaningful line, or false at end of input.
  bool next(std::string_view& line, std::size_t& line_no) {
    while (pos_ < text_.size()) {
      const std::size_t end = text_.find('\n', pos_);
      std::string_view raw = text_.substr(pos_, end == std::string_view::npos ? end : end - pos_);
      pos_ = end == std::string_view::npos ? text_.size() : end + 1;
      ++line_no_;
      if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
      const std::string_view body = trim(raw);
      if (body.empty() || body.front() == '#') continue;
      line = raw;
      line_no = line_no_;
      return true;
    }
    return false;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

inline void expect_header(std::string_view line, std::string_view header, std::size_t line_no,
                          const std::string& source) {
  const auto got = split_fields(line);
  const auto want = split_fields(header);
  if (got != want)
    throw ParseError(source, line_no,
                     "missing or incorrect header, expected '" + std::string(header) + "'");
}

struct FieldReader {
  const std::vector<std::string_view>& fields;
  const std::string& source;
  std::size_t line_no;
  std::size_t next = 0;

  double number(std::string_view column) {
    const std::string_view tok = fields[next++];
    double value = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (tok.empty() || ec == std::errc::invalid_argument || ptr != last)
      throw ParseError(source, line_no,
                       "unparsable number '" + std::string(tok) + "' in column " +
                           std::string(column));
    if (ec == std::errc::result_out_of_range)
      throw ParseError(source, line_no,
                       "number out of range '" + std::string(tok) + "' in column " +
                           std::string(column));
    if (!std::isfinite(value))
      throw ParseError(source, line_no, "non-finite value in column " + std::string(column));
    return value;
  }

  Vec3 vec3(std::string_view a, std::string_view b, std::string_view c) {
    const double x = number(a);
    const double y = number(b);
    const double z = number(c);
    return {x, y, z};
  }

  Quat quat() {
    const double w = number("qw");
    const double x = number("qx");
    const double y = number("qy");
    const double z = number("qz");
    return {w, x, y, z};
  }

  Color color() {
    const double r = number("cr");
    const double g = number("cg");
    const double b = number("cb");
    const double a = number("ca");
    const Color c{r, g, b, a};
    if (!in_unit_range(c)) throw ParseError(source, line_no, "color component outside [0,1]");
    return c;
  }

  Vec3 scale() {
    const Vec3 s = vec3("sx", "sy", "sz");
    if (!(s.x > 0.0 && s.y > 0.0 && s.z > 0.0))
      throw ParseError(source, line_no, "scale must be > 0");
    return s;
  }

  // Already-unit rows are kept bit-for-bit so that write -> parse is the identity.
  Quat unit_quat(std::vector<IngestWarning>* warnings) {
    const Quat raw = quat();
    const double n = norm(raw);
    if (!(n > 1e-12))
      throw ParseError(source, line_no, "quaternion norm below 1e-12: " + describe(raw));
    if (std::abs(n - 1.0) <= 1e-12) return raw;
    if (std::abs(n - 1.0) > 1e-3 && warnings != nullptr)
      warnings->push_back({source, line_no, "quaternion norm " + std::to_string(n) +
                                                " renormalized to 1"});
    return normalize_quaternion(raw);
  }
};

inline void append_number(std::string& out, double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  (void)ec;
  out.append(buf.data(), ptr);
}

}  // namespace detail

/// Parses a trajectory CSV (18-column state schema).
inline std::vector<StateSample> parse_state_csv(std::string_view text, const std::string& source,
                                                std::vector<IngestWarning>* warnings = nullptr) {
  detail::CsvLines lines(text);
  std::string_view line;
  std::size_t line_no = 0;
  if (!lines.next(line, line_no)) throw ParseError(source, 1, "missing header");
  detail::expect_header(line, kStateHeader, line_no, source);

  std::vector<StateSample> samples;
  while (lines.next(line, line_no)) {
    const auto fields = detail::split_fields(line);
    if (fields.size() != 18)
      throw ParseError(source, line_no,
                       "expected 18 columns, found " + std::to_string(fields.size()));
    detail::FieldReader r{fields, source, line_no};
    StateSample s;
    s.t = r.number("t");
    s.p = r.vec3("px", "py", "pz");
    s.q = r.unit_quat(warnings);
    s.v = r.vec3("vx", "vy", "vz");
    s.c = r.color();
    s.s = r.scale();
    if (!samples.empty() && !(s.t > samples.back().t))
      throw ParseError(source, line_no, "non-increasing time");
    samples.push_back(s);
  }
  return samples;
}

/// Parses a static-object CSV (15-column schema, glyph name last).
inline std::vector<StaticObjectSpec> parse_static_csv(
    std::string_view text, const std::string& source,
    std::vector<IngestWarning>* warnings = nullptr) {
  detail::CsvLines lines(text);
  std::string_view line;
  std::size_t line_no = 0;
  if (!lines.next(line, line_no)) throw ParseError(source, 1, "missing header");
  detail::expect_header(line, kStaticHeader, line_no, source);

  std::vector<StaticObjectSpec> out;
  while (lines.next(line, line_no)) {
    const auto fields = detail::split_fields(line);
    if (fields.size() != 15)
      throw ParseError(source, line_no,
                       "expected 15 columns, found " + std::to_string(fields.size()));
    detail::FieldReader r{fields, source, line_no};
    StaticObjectSpec obj;
    obj.p = r.vec3("px", "py", "pz");
    obj.q = r.unit_quat(warnings);
    obj.c = r.color();
    obj.s = r.scale();
    const auto kind = parse_glyph_kind(fields[14]);
    if (!kind)
      throw ParseError(source, line_no,
                       "unknown object type '" + std::string(fields[14]) + "', allowed " +
                           glyph_name_list());
    obj.obj = *kind;
    out.push_back(obj);
  }
  return out;
}

/// Header plus one row per sample, shortest round-trip decimal form.
inline std::string write_state_csv(std::span<const StateSample> samples) {
  std::string out;
  out.reserve(32 + samples.size() * 160);
  out += kStateHeader;
  out += '\n';
  for (const StateSample& s : samples) {
    const std::array<double, 18> row{s.t,   s.p.x, s.p.y, s.p.z, s.q.w, s.q.x, s.q.y, s.q.z, s.v.x,
                                     s.v.y, s.v.z, s.c.r, s.c.g, s.c.b, s.c.a, s.s.x, s.s.y, s.s.z};
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i != 0) out += ',';
      detail::append_number(out, row[i]);
    }
    out += '\n';
  }
  return out;
}

inline std::string write_static_csv(std::span<const StaticObjectSpec> statics) {
  std::string out;
  out += kStaticHeader;
  out += '\n';
  for (const StaticObjectSpec& o : statics) {
    const std::array<double, 14> row{o.p.x, o.p.y, o.p.z, o.q.w, o.q.x, o.q.y, o.q.z,
                                     o.c.r, o.c.g, o.c.b, o.c.a, o.s.x, o.s.y, o.s.z};
    for (double v : row) {
      detail::append_number(out, v);
      out += ',';
    }
    out += glyph_name(o.obj);
    out += '\n';
  }
  return out;
}

// --- scene config ------------------------------------------------------------

namespace detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                                const std::string& where) {
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw ValidationError("unknown key '" + where + item.key() + "' in scene config");
  }
}

inline double json_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ValidationError("'" + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ValidationError("'" + key + "' must be finite");
  return d;
}

inline std::string json_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ValidationError("'" + key + "' must be a string");
  return v.get<std::string>();
}

inline Color json_color(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 4)
    throw ValidationError("'" + key + "' must be an array of 4 numbers [r,g,b,a]");
  const Color c{json_number(v[0], key), json_number(v[1], key), json_number(v[2], key),
                json_number(v[3], key)};
  if (!in_unit_range(c)) throw ValidationError("'" + key + "' components must be in [0,1]");
  return c;
}

inline json color_json(Color c) { return json::array({c.r, c.g, c.b, c.a}); }

}  // namespace detail

/// Parses the scene config JSON. Absent optional keys take their defaults.
inline SceneConfig parse_scene_config(std::string_view json_text) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed scene config JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("scene config must be a JSON object");
  detail::reject_unknown_keys(doc,
                              {"vehicle_dir", "dynamic_dir", "static_dir", "colors", "glyphs",
                               "snapshot_style", "camera", "follow_target", "trail",
                               "timelapse_interval_s", "lod_epsilon_m", "line_width_px",
                               "background"},
                              "");
  SceneConfig cfg;
  for (const char* key : {"vehicle_dir", "dynamic_dir", "static_dir"})
    if (!doc.contains(key)) throw ValidationError(std::string("missing required key '") + key + "'");
  cfg.vehicle_dir = detail::json_string(doc["vehicle_dir"], "vehicle_dir");
  cfg.dynamic_dir = detail::json_string(doc["dynamic_dir"], "dynamic_dir");
  cfg.static_dir = detail::json_string(doc["static_dir"], "static_dir");

  if (doc.contains("colors")) {
    const json& colors = doc["colors"];
    if (!colors.is_object()) throw ValidationError("'colors' must be an object");
    for (const auto& item : colors.items())
      cfg.colors[item.key()] = detail::json_color(item.value(), "colors." + item.key());
  }
  if (doc.contains("glyphs")) {
    const json& glyphs = doc["glyphs"];
    if (!glyphs.is_object()) throw ValidationError("'glyphs' must be an object");
    for (const auto& item : glyphs.items()) {
      const std::string name = detail::json_string(item.value(), "glyphs." + item.key());
      const auto kind = parse_glyph_kind(name);
      if (!kind)
        throw ValidationError("glyphs." + item.key() + ": unknown object type '" + name +
                              "', allowed " + glyph_name_list());
      cfg.glyphs[item.key()] = *kind;
    }
  }
  if (doc.contains("snapshot_style")) {
    const std::string s = detail::json_string(doc["snapshot_style"], "snapshot_style");
    if (s == "line") cfg.snapshot_style = SnapshotStyle::line;
    else if (s == "timelapse") cfg.snapshot_style = SnapshotStyle::timelapse;
    else throw ValidationError("snapshot_style must be \"line\" or \"timelapse\"");
  }
  if (doc.contains("camera")) {
    const std::string s = detail::json_string(doc["camera"], "camera");
    if (s == "orbit") cfg.camera = CameraMode::orbit;
    else if (s == "follow") cfg.camera = CameraMode::follow;
    else throw ValidationError("camera must be \"orbit\" or \"follow\"");
  }
  if (doc.contains("follow_target"))
    cfg.follow_target = detail::json_string(doc["follow_target"], "follow_target");
  if (doc.contains("trail")) {
    const json& trail = doc["trail"];
    if (!trail.is_object()) throw ValidationError("'trail' must be an object");
    detail::reject_unknown_keys(trail, {"duration_s", "color"}, "trail.");
    if (trail.contains("duration_s")) {
      cfg.trail.duration_s = detail::json_number(trail["duration_s"], "trail.duration_s");
      if (cfg.trail.duration_s < 0.0) throw ValidationError("duration_s must be >= 0");
    }
    if (trail.contains("color")) cfg.trail.color = detail::json_color(trail["color"], "trail.color");
  }
  if (doc.contains("timelapse_interval_s")) {
    cfg.timelapse_interval_s =
        detail::json_number(doc["timelapse_interval_s"], "timelapse_interval_s");
    if (*cfg.timelapse_interval_s <= 0.0)
      throw ValidationError("timelapse_interval_s must be > 0");
  }
  if (doc.contains("lod_epsilon_m")) {
    cfg.lod_epsilon_m = detail::json_number(doc["lod_epsilon_m"], "lod_epsilon_m");
    if (cfg.lod_epsilon_m < 0.0) throw ValidationError("lod_epsilon_m must be >= 0");
  }
  if (doc.contains("line_width_px")) {
    cfg.line_width_px = detail::json_number(doc["line_width_px"], "line_width_px");
    if (cfg.line_width_px <= 0.0) throw ValidationError("line_width_px must be > 0");
  }
  if (doc.contains("background")) cfg.background = detail::json_color(doc["background"], "background");
  return cfg;
}

/// Inverse of parse_scene_config. Optional keys are written only when set.
inline nlohmann::json scene_config_json(const SceneConfig& cfg) {
  using detail::json;
  json j = json::object();
  j["vehicle_dir"] = cfg.vehicle_dir;
  j["dynamic_dir"] = cfg.dynamic_dir;
  j["static_dir"] = cfg.static_dir;
  if (!cfg.colors.empty()) {
    json colors = json::object();
    for (const auto& [id, c] : cfg.colors) colors[id] = detail::color_json(c);
    j["colors"] = colors;
  }
  if (!cfg.glyphs.empty()) {
    json glyphs = json::object();
    for (const auto& [id, g] : cfg.glyphs) glyphs[id] = std::string(glyph_name(g));
    j["glyphs"] = glyphs;
  }
  j["snapshot_style"] = cfg.snapshot_style == SnapshotStyle::line ? "line" : "timelapse";
  j["camera"] = cfg.camera == CameraMode::orbit ? "orbit" : "follow";
  if (cfg.follow_target) j["follow_target"] = *cfg.follow_target;
  j["trail"] = {{"duration_s", cfg.trail.duration_s}, {"color", detail::color_json(cfg.trail.color)}};
  if (cfg.timelapse_interval_s) j["timelapse_interval_s"] = *cfg.timelapse_interval_s;
  j["lod_epsilon_m"] = cfg.lod_epsilon_m;
  j["line_width_px"] = cfg.line_width_px;
  j["background"] = detail::color_json(cfg.background);
  return j;
}

// --- folder loading ------------------------------------------------------------

namespace detail {

/// Regular *.csv files directly inside dir, sorted by file name.
inline std::vector<std::filesystem::path> list_csv_files(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec))
    throw IoError("data folder '" + dir.string() + "' does not exist or is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  if (ec) throw IoError("cannot list '" + dir.string() + "': " + ec.message());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return files;
}

}  // namespace detail

struct LoadedScene {
  Scene scene;
  IngestReport report;
};

/// Loads a scene from a config file and its three data folders. Relative
/// folder paths resolve against the config file's directory.
inline LoadedScene load_scene(const std::filesystem::path& config_path) {
  namespace fs = std::filesystem;
  const SceneConfig cfg = parse_scene_config(read_text_file(config_path));
  const fs::path base = config_path.parent_path();
  auto resolve = [&](const std::string& dir) {
    const fs::path p(dir);
    return p.is_absolute() ? p : base / p;
  };

  IngestReport report;
  std::vector<Trajectory> trajectories;
  std::vector<StaticObjectSpec> statics;
  std::map<std::string, fs::path> origin;

  auto load_moving = [&](const std::string& dir, TrajectoryKind kind, GlyphKind glyph) {
    for (const fs::path& file : detail::list_csv_files(resolve(dir))) {
      const std::string source = file.string();
      Trajectory traj;
      traj.id = file.stem().string();
      traj.kind = kind;
      traj.glyph = glyph;
      traj.samples = parse_state_csv(read_text_file(file), source, &report.warnings);
      if (traj.samples.empty()) throw ParseError(source, 1, "trajectory file has no data rows");
      const auto [it, inserted] = origin.emplace(traj.id, file);
      if (!inserted)
        throw ValidationError("duplicate trajectory id '" + traj.id + "' in '" +
                              it->second.string() + "' and '" + source + "'");
      ++report.files_read;
      report.rows_read += traj.samples.size();
      trajectories.push_back(std::move(traj));
    }
  };
  load_moving(cfg.vehicle_dir, TrajectoryKind::vehicle, GlyphKind::quadrotor);
  load_moving(cfg.dynamic_dir, TrajectoryKind::dynamic, GlyphKind::cube);

  for (const fs::path& file : detail::list_csv_files(resolve(cfg.static_dir))) {
    auto rows = parse_static_csv(read_text_file(file), file.string(), &report.warnings);
    ++report.files_read;
    report.rows_read += rows.size();
    statics.insert(statics.end(), rows.begin(), rows.end());
  }

  if (trajectories.empty() && statics.empty()) throw ValidationError("scene is empty");
  for (Trajectory& traj : trajectories) {
    if (auto it = cfg.colors.find(traj.id); it != cfg.colors.end()) traj.color_override = it->second;
    if (auto it = cfg.glyphs.find(traj.id); it != cfg.glyphs.end()) traj.glyph = it->second;
  }
  return {Scene::build(std::move(trajectories), std::move(statics), cfg), std::move(report)};
}

}  // namespace flymation
