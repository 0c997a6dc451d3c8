#pragma once

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "flymation/flymation.hpp"
#include "flymation/server.hpp"

namespace flymation::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kIo = 3 };

class UsageError : public Error {
 public:
  using Error::Error;
};

/// Diagnostics logger on standard error. FLYMATION_LOG picks the level
/// (error, warn, info, debug); anything else means info.
inline std::shared_ptr<spdlog::logger> logger() {
  static const auto log = [] {
    auto l = spdlog::stderr_logger_mt("flymation");
    l->set_pattern("flymation: %l: %v");
    return l;
  }();
  spdlog::level::level_enum level = spdlog::level::info;
  if (const char* env = std::getenv("FLYMATION_LOG")) {
    const std::string v = env;
    if (v == "error") level = spdlog::level::err;
    else if (v == "warn") level = spdlog::level::warn;
    else if (v == "debug") level = spdlog::level::debug;
  }
  log->set_level(level);
  return log;
}

namespace detail {

struct CameraFlags {
  std::string cam;
  bool cam_auto = false;
  int width = 0;
  int height = 0;
};

inline OrbitState parse_cam(const std::string& text, const Aabb& bbox) {
  std::vector<double> v;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string field(flymation::detail::trim(std::string_view(text).substr(start, comma - start)));
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(x))
      throw UsageError("--cam expects \"az,el,radius\" (degrees, degrees, metres), got '" + text + "'");
    v.push_back(x);
    start = comma + 1;
  }
  if (v.size() != 3) throw UsageError("--cam expects three numbers \"az,el,radius\", got '" + text + "'");
  if (!(v[2] > 0.0)) throw UsageError("--cam radius must be > 0");
  if (std::abs(v[1]) > 89.0) throw UsageError("--cam elevation must be within [-89, 89] degrees");
  OrbitState s;
  s.pivot = bbox.center();
  s.azimuth = deg_to_rad(v[0]);
  s.elevation = deg_to_rad(v[1]);
  s.radius = std::clamp(v[2], kOrbitMinRadius, kOrbitMaxRadius);
  return s;
}

inline OrbitState orbit_from_flags(const CameraFlags& f, const Scene& scene) {
  if (!f.cam.empty()) return parse_cam(f.cam, scene.bbox());
  return frame_bbox(scene.bbox());
}

inline void check_size(int width, int height) {
  if (width < 1 || height < 1 || width > 16384 || height > 16384)
    throw UsageError("image size must be between 1x1 and 16384x16384");
}

inline std::string lowercase_extension(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  for (char& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return ext;
}

inline void write_png(const std::filesystem::path& path, const Framebuffer& fb) {
  const auto bytes = encode_png(fb);
  write_bytes(path, std::span(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

inline LoadedScene load(const std::string& config) {
  LoadedScene loaded = load_scene(config);
  for (const IngestWarning& w : loaded.report.warnings)
    logger()->warn("{}:{}: {}", w.source, w.line, w.message);
  logger()->debug("loaded {} trajectories, {} statics, {} samples from {}",
                  loaded.scene.trajectories().size(), loaded.scene.statics().size(),
                  loaded.scene.sample_count(), config);
  return loaded;
}

inline nlohmann::json vec_array(Vec3 v) { return nlohmann::json::array({v.x, v.y, v.z}); }

inline std::string valid_ids(const Scene& scene) {
  std::string out;
  for (const Trajectory& t : scene.trajectories()) out += (out.empty() ? "" : ", ") + t.id;
  return out.empty() ? "(none)" : out;
}

inline std::atomic<bool>& interrupted() {
  static std::atomic<bool> flag{false};
  return flag;
}

extern "C" inline void on_interrupt(int) { interrupted().store(true); }

}  // namespace detail

// --- subcommands ---------------------------------------------------------------------

inline int cmd_validate(const std::string& config, std::ostream& out) {
  const LoadedScene loaded = detail::load(config);
  const Scene& scene = loaded.scene;
  nlohmann::json warnings = nlohmann::json::array();
  for (const IngestWarning& w : loaded.report.warnings)
    warnings.push_back({{"source", w.source}, {"line", w.line}, {"message", w.message}});
  const nlohmann::json report{
      {"trajectories", scene.trajectories().size()},
      {"samples_total", scene.sample_count()},
      {"statics", scene.statics().size()},
      {"t_range", {scene.t_range().t0, scene.t_range().t1}},
      {"bbox", {{"min", detail::vec_array(scene.bbox().min)}, {"max", detail::vec_array(scene.bbox().max)}}},
      {"warnings", warnings}};
  out << report.dump(2) << '\n';
  return kOk;
}

struct SnapshotOptions {
  std::string config;
  std::string mode;  // empty: the config's snapshot_style
  std::string out;
  detail::CameraFlags camera{{}, false, 800, 600};
  std::optional<double> interval;
  std::optional<double> lod;
};

inline int cmd_snapshot(const SnapshotOptions& o, std::ostream& out) {
  const std::string ext = detail::lowercase_extension(o.out);
  if (ext != ".png" && ext != ".svg") throw UsageError("--out must end in .png or .svg, got '" + o.out + "'");
  if (!o.mode.empty() && o.mode != "line" && o.mode != "timelapse")
    throw UsageError("--mode must be line or timelapse");
  if (o.interval && !(*o.interval > 0.0)) throw UsageError("--interval must be > 0");
  if (o.lod && !(*o.lod >= 0.0)) throw UsageError("--lod must be >= 0");
  detail::check_size(o.camera.width, o.camera.height);

  const LoadedScene loaded = detail::load(o.config);
  const Scene& scene = loaded.scene;
  const bool timelapse = o.mode.empty() ? scene.config().snapshot_style == SnapshotStyle::timelapse
                                        : o.mode == "timelapse";
  const OrbitState orbit = detail::orbit_from_flags(o.camera, scene);

  RenderBatch batch;
  nlohmann::json glyph_counts = nlohmann::json::object();
  if (timelapse) {
    batch = compile_snapshot_timelapse(scene, o.interval ? o.interval : scene.config().timelapse_interval_s);
    std::vector<std::size_t> counts(scene.trajectories().size(), 0);
    for (const GlyphInstance& g : batch.glyphs)
      if (g.trajectory >= 0) ++counts[static_cast<std::size_t>(g.trajectory)];
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const std::string& id = scene.trajectories()[i].id;
      logger()->info("timelapse: trajectory '{}' has {} glyphs", id, counts[i]);
      glyph_counts[id] = counts[i];
    }
  } else {
    batch = compile_snapshot_line(scene, o.lod.value_or(scene.config().lod_epsilon_m));
  }

  const CameraMatrices cam = orbit_camera(orbit, o.camera.width, o.camera.height);
  if (ext == ".png") {
    detail::write_png(o.out, render(batch, cam, o.camera.width, o.camera.height));
  } else {
    write_text_file(o.out, export_svg(batch, cam, o.camera.width, o.camera.height));
  }
  nlohmann::json report{{"out", o.out},
                        {"mode", timelapse ? "timelapse" : "line"},
                        {"width", o.camera.width},
                        {"height", o.camera.height},
                        {"polylines", batch.polylines.size()},
                        {"glyphs", batch.glyphs.size()},
                        {"camera",
                         {{"pivot", detail::vec_array(orbit.pivot)},
                          {"azimuth_deg", orbit.azimuth * 180.0 / kPi},
                          {"elevation_deg", orbit.elevation * 180.0 / kPi},
                          {"radius", orbit.radius}}}};
  if (timelapse) report["glyphs_per_trajectory"] = glyph_counts;
  out << report.dump(2) << '\n';
  return kOk;
}

struct BakeOptions {
  std::string config;
  std::string out;
  double fps = 30.0;
  std::optional<double> t0, t1;
  std::optional<double> trail;  // seconds; overrides the config
  std::string follow;
  detail::CameraFlags camera{{}, false, 640, 480};
};

/// Frame instants t0 + k/fps for every k with t0 + k/fps <= t1, endpoints included
/// when they fall on the grid (a 1e-9 slack absorbs rounding).
inline std::vector<double> bake_times(double t0, double t1, double fps) {
  const auto count = static_cast<std::size_t>(std::floor((t1 - t0) * fps + 1e-9)) + 1;
  std::vector<double> times(count);
  for (std::size_t k = 0; k < count; ++k) times[k] = std::min(t0 + static_cast<double>(k) / fps, t1);
  return times;
}

inline int cmd_bake(const BakeOptions& o, std::ostream& out) {
  if (!(o.fps > 0.0) || !std::isfinite(o.fps)) throw UsageError("--fps must be > 0");
  if (o.trail && !(*o.trail >= 0.0)) throw UsageError("--trail must be >= 0");
  if (!o.follow.empty() && (!o.camera.cam.empty() || o.camera.cam_auto))
    throw UsageError("--follow cannot be combined with --cam or --cam-auto");
  detail::check_size(o.camera.width, o.camera.height);

  const LoadedScene loaded = detail::load(o.config);
  const Scene& scene = loaded.scene;
  const TimeRange range = scene.t_range();
  const double t0 = o.t0.value_or(range.t0);
  const double t1 = o.t1.value_or(range.t1);
  if (!(t0 <= t1) || t0 < range.t0 || t1 > range.t1)
    throw UsageError("--t0/--t1 must satisfy " + std::to_string(range.t0) + " <= t0 <= t1 <= " +
                     std::to_string(range.t1));

  std::string follow = o.follow;
  if (follow.empty() && o.camera.cam.empty() && !o.camera.cam_auto &&
      scene.config().camera == CameraMode::follow)
    follow = scene.config().follow_target.value_or("");
  const Trajectory* target = nullptr;
  if (!follow.empty()) {
    target = scene.find(follow);
    if (target == nullptr)
      throw UsageError("--follow: unknown trajectory id '" + follow + "'; valid ids: " + detail::valid_ids(scene));
  }

  TrailConfig trail = scene.config().trail;
  if (o.trail) trail.duration_s = *o.trail;
  const OrbitState orbit = detail::orbit_from_flags(o.camera, scene);
  const CameraMatrices orbit_cam = orbit_camera(orbit, o.camera.width, o.camera.height);
  const double far_plane = std::max(100.0, 4.0 * norm(scene.bbox().extent()));

  ensure_directory(o.out);
  const std::vector<double> times = bake_times(t0, t1, o.fps);
  FollowState follow_state;
  std::optional<CameraMatrices> last_follow;
  for (std::size_t k = 0; k < times.size(); ++k) {
    CameraMatrices cam = orbit_cam;
    if (target != nullptr) {
      const PoseSample pose = sample_trajectory(*target, times[k]);
      if (pose.visible) {
        const FollowResult r = follow_pose(follow_state, pose, 1.0 / o.fps);
        follow_state = r.state;
        last_follow = follow_camera(r.eye, r.target, o.camera.width, o.camera.height, far_plane);
      }
      if (last_follow) cam = *last_follow;
    }
    const RenderBatch batch = compile_animation_frame(scene, times[k], trail);
    char name[32];
    std::snprintf(name, sizeof name, "frame_%06zu.png", k);
    detail::write_png(std::filesystem::path(o.out) / name, render(batch, cam, o.camera.width, o.camera.height));
    logger()->debug("frame {} at t = {}", k, times[k]);
  }
  const nlohmann::json report{{"out", o.out}, {"frames", times.size()}, {"t0", t0}, {"t1", t1},
                              {"fps", o.fps}, {"follow", follow.empty() ? nlohmann::json() : nlohmann::json(follow)}};
  out << report.dump(2) << '\n';
  return kOk;
}

inline int cmd_bundle(const std::string& config, const std::string& out_dir, std::ostream& out) {
  const LoadedScene loaded = detail::load(config);
  const SceneBundle bundle = serialize_bundle(loaded.scene);
  write_bundle(bundle, out_dir);
  const nlohmann::json report{{"out", out_dir},
                              {"manifest_bytes", bundle.manifest.size()},
                              {"blob_bytes", bundle.blob.size()},
                              {"trajectories", loaded.scene.trajectories().size()}};
  out << report.dump(2) << '\n';
  return kOk;
}

inline int cmd_goldens(const std::string& config, const std::string& out_file, std::size_t count,
                       std::ostream& out) {
  if (count < 1) throw UsageError("--count must be >= 1");
  const LoadedScene loaded = detail::load(config);
  const Scene rounded = deserialize_bundle(serialize_bundle(loaded.scene));
  const auto times = golden_query_times(rounded.t_range(), count);
  write_text_file(out_file, export_goldens(rounded, times));
  const nlohmann::json report{{"out", out_file},
                              {"rows", times.size() * rounded.trajectories().size()},
                              {"query_times", times.size()}};
  out << report.dump(2) << '\n';
  return kOk;
}

struct ServeOptions {
  std::string config;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string assets;
};

/// Serves until SIGINT or SIGTERM.
inline int cmd_serve(const ServeOptions& o, std::ostream& out) {
  if (o.port < 0 || o.port > 65535) throw UsageError("--port must be in [0, 65535]");
  const LoadedScene loaded = detail::load(o.config);
  ViewerServer server(make_served_content(loaded.scene), o.assets);
  const int port = server.bind(o.host, o.port);

  detail::interrupted().store(false);
  auto previous_int = std::signal(SIGINT, detail::on_interrupt);
  auto previous_term = std::signal(SIGTERM, detail::on_interrupt);
  std::atomic<bool> done{false};
  std::thread watcher([&] {
    while (!done.load() && !detail::interrupted().load())
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    server.stop();
  });
  out << nlohmann::json{{"url", "http://" + o.host + ":" + std::to_string(port) + "/"}, {"port", port}}.dump()
      << std::endl;
  logger()->info("serving on http://{}:{}/ (Ctrl-C to stop)", o.host, port);
  server.run();
  done.store(true);
  watcher.join();
  std::signal(SIGINT, previous_int);
  std::signal(SIGTERM, previous_term);
  logger()->info("server stopped");
  return kOk;
}

struct DemoOptions {
  std::string kind;
  std::string out;
  std::size_t n = 4;
  std::uint64_t seed = 7;
  LorenzParams lorenz;
  std::size_t gates = 7;
  std::size_t laps = 1;
};

inline int cmd_demo(const DemoOptions& o, std::ostream& out) {
  std::filesystem::path config;
  if (o.kind == "lorenz") {
    config = gen_lorenz_scene(o.n, o.lorenz, o.out, o.seed);
  } else if (o.kind == "racetrack") {
    config = gen_racetrack_scene(o.gates, o.laps, o.out);
  } else {
    throw UsageError("demo kind must be lorenz or racetrack");
  }
  out << config.string() << '\n';
  return kOk;
}

// --- entry point ---------------------------------------------------------------------

/// Parses argv and runs one subcommand. Machine-readable output goes to `out`,
/// diagnostics to standard error. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout) {
  CLI::App app{"Headless flight-trajectory visualization", "flymation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "flymation 1.0");

  auto add_camera = [](CLI::App* sub, detail::CameraFlags& f) {
    auto* cam = sub->add_option("--cam", f.cam, "Orbit camera \"az,el,radius\" (degrees, degrees, metres)");
    auto* cam_auto = sub->add_flag("--cam-auto", f.cam_auto, "Frame the scene bounding box (default)");
    cam->excludes(cam_auto);
    sub->add_option("--width", f.width, "Image width in pixels")->capture_default_str();
    sub->add_option("--height", f.height, "Image height in pixels")->capture_default_str();
  };

  std::string config;
  auto* validate = app.add_subcommand("validate", "Load a scene and print a JSON report");
  validate->add_option("scene", config, "Scene config JSON")->required();

  SnapshotOptions snap;
  auto* snapshot = app.add_subcommand("snapshot", "Render a whole-trajectory snapshot to PNG or SVG");
  snapshot->add_option("scene", snap.config, "Scene config JSON")->required();
  snapshot->add_option("--mode", snap.mode, "line or timelapse (default: the config's snapshot_style)")
      ->check(CLI::IsMember({"line", "timelapse"}));
  snapshot->add_option("--out", snap.out, "Output .png or .svg")->required();
  snapshot->add_option("--interval", snap.interval, "Time-lapse spacing in seconds");
  snapshot->add_option("--lod", snap.lod, "Line-mode simplification tolerance in metres");
  add_camera(snapshot, snap.camera);

  BakeOptions bake;
  auto* bake_cmd = app.add_subcommand("bake", "Render animation frames as numbered PNGs");
  bake_cmd->add_option("scene", bake.config, "Scene config JSON")->required();
  bake_cmd->add_option("--out", bake.out, "Output directory")->required();
  bake_cmd->add_option("--fps", bake.fps, "Frames per second")->capture_default_str();
  bake_cmd->add_option("--t0", bake.t0, "First frame time (default: scene start)");
  bake_cmd->add_option("--t1", bake.t1, "Last frame time (default: scene end)");
  bake_cmd->add_option("--trail", bake.trail, "Trail duration in seconds (default: the config's)");
  bake_cmd->add_option("--follow", bake.follow, "Follow this trajectory id with the chase camera");
  add_camera(bake_cmd, bake.camera);

  std::string out_path;
  auto* bundle = app.add_subcommand("bundle", "Write manifest.json and blob.bin for the viewer");
  bundle->add_option("scene", config, "Scene config JSON")->required();
  bundle->add_option("--out", out_path, "Output directory")->required();

  std::size_t golden_count = 101;
  auto* goldens = app.add_subcommand("goldens", "Write sampled poses for cross-checking interpolation");
  goldens->add_option("scene", config, "Scene config JSON")->required();
  goldens->add_option("--out", out_path, "Output CSV file")->required();
  goldens->add_option("--count", golden_count, "Query instants per trajectory")->capture_default_str();

  ServeOptions serve_opts;
  auto* serve = app.add_subcommand("serve", "Serve the scene bundle and viewer over HTTP");
  serve->add_option("scene", serve_opts.config, "Scene config JSON")->required();
  serve->add_option("--port", serve_opts.port, "TCP port (0 picks a free one)")->capture_default_str();
  serve->add_option("--host", serve_opts.host, "Bind address")->capture_default_str();
  serve->add_option("--assets", serve_opts.assets, "Directory of static viewer files served at /");

  DemoOptions demo_opts;
  auto* demo = app.add_subcommand("demo", "Generate a demo scene folder");
  demo->add_option("kind", demo_opts.kind, "lorenz or racetrack")
      ->required()
      ->check(CLI::IsMember({"lorenz", "racetrack"}));
  demo->add_option("--out", demo_opts.out, "Output directory")->required();
  demo->add_option("--n", demo_opts.n, "Lorenz: number of trajectories")->capture_default_str();
  demo->add_option("--seed", demo_opts.seed, "Lorenz: perturbation seed")->capture_default_str();
  demo->add_option("--duration", demo_opts.lorenz.duration, "Lorenz: seconds")->capture_default_str();
  demo->add_option("--dt", demo_opts.lorenz.dt, "Lorenz: RK4 step")->capture_default_str();
  demo->add_option("--sigma", demo_opts.lorenz.sigma)->capture_default_str();
  demo->add_option("--rho", demo_opts.lorenz.rho)->capture_default_str();
  demo->add_option("--beta", demo_opts.lorenz.beta)->capture_default_str();
  demo->add_option("--gates", demo_opts.gates, "Racetrack: number of gates")->capture_default_str();
  demo->add_option("--laps", demo_opts.laps, "Racetrack: laps")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, std::cerr);
      return kOk;
    }
    app.exit(e, std::cerr, std::cerr);
    return kUsage;
  }

  try {
    if (*validate) return cmd_validate(config, out);
    if (*snapshot) return cmd_snapshot(snap, out);
    if (*bake_cmd) return cmd_bake(bake, out);
    if (*bundle) return cmd_bundle(config, out_path, out);
    if (*goldens) return cmd_goldens(config, out_path, golden_count, out);
    if (*serve) return cmd_serve(serve_opts, out);
    if (*demo) return cmd_demo(demo_opts, out);
  } catch (const UsageError& e) {
    logger()->error("{}", e.what());
    return kUsage;
  } catch (const IoError& e) {
    logger()->error("{}", e.what());
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    logger()->error("{}", e.what());
    return kIo;
  } catch (const std::exception& e) {
    logger()->error("{}", e.what());
    return kData;
  }
  return kUsage;
}

/// Convenience overload; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout) {
  std::vector<const char*> argv{"flymation"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out);
}

}  // namespace flymation::cli
