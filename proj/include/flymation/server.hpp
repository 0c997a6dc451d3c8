#pragma once

#include <httplib.h>

#include <filesystem>
#include <memory>
#include <string>
#include <utility>

#include "flymation/bundle.hpp"
#include "flymation/error.hpp"
#include "flymation/model.hpp"

namespace flymation {

/// Everything the viewer downloads, computed once from the loaded scene.
/// Goldens are sampled from the bundle's own binary32 data, so a viewer that
/// decodes the blob should reproduce them to float precision.
struct ServedContent {
  SceneBundle bundle;
  std::string goldens;
};

inline ServedContent make_served_content(const Scene& scene) {
  ServedContent c;
  c.bundle = serialize_bundle(scene);
  const Scene rounded = deserialize_bundle(c.bundle);
  const auto times = golden_query_times(rounded.t_range());
  c.goldens = export_goldens(rounded, times);
  return c;
}

inline constexpr const char* kFallbackIndex =
    "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>flymation</title></head>\n"
    "<body><p>No viewer assets were configured. Data endpoints:</p>\n<ul>\n"
    "<li><a href=\"/api/manifest\">/api/manifest</a></li>\n"
    "<li><a href=\"/api/blob\">/api/blob</a></li>\n"
    "<li><a href=\"/api/goldens\">/api/goldens</a></li>\n</ul></body></html>\n";

/// Read-only HTTP front end over immutable content. Handlers run on the
/// server's worker pool and only read `content_`.
class ViewerServer {
 public:
  explicit ViewerServer(ServedContent content, std::filesystem::path assets_dir = {})
      : content_(std::make_shared<const ServedContent>(std::move(content))) {
    // httplib's default also sets SO_REUSEPORT, which would let a second server
    // share a busy port instead of failing to bind.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
    });
    auto c = content_;
    server_.Get("/api/manifest", [c](const httplib::Request&, httplib::Response& res) {
      res.set_content(c->bundle.manifest, "application/json");
    });
    // set_content leaves Range handling (206, multipart) to the library.
    server_.Get("/api/blob", [c](const httplib::Request&, httplib::Response& res) {
      res.set_content(reinterpret_cast<const char*>(c->bundle.blob.data()), c->bundle.blob.size(),
                      "application/octet-stream");
    });
    server_.Get("/api/goldens", [c](const httplib::Request&, httplib::Response& res) {
      res.set_content(c->goldens, "text/csv");
    });
    if (!assets_dir.empty()) {
      if (!std::filesystem::is_directory(assets_dir))
        throw IoError("assets directory '" + assets_dir.string() + "' does not exist");
      server_.set_mount_point("/", assets_dir.string());
    } else {
      server_.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(kFallbackIndex, "text/html");
      });
    }
  }

  ViewerServer(const ViewerServer&) = delete;
  ViewerServer& operator=(const ViewerServer&) = delete;

  /// Binds the listening socket; port 0 picks a free port. Returns the port.
  int bind(const std::string& host, int port) {
    if (port == 0) {
      const int p = server_.bind_to_any_port(host);
      if (p < 0) throw IoError("cannot bind " + host + " on any port");
      return p;
    }
    if (!server_.bind_to_port(host, port))
      throw IoError("cannot bind " + host + ":" + std::to_string(port) + " (address in use?)");
    return port;
  }

  /// Blocks serving requests until stop() is called.
  void run() { server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() const { server_.wait_until_ready(); }

  const ServedContent& content() const { return *content_; }

 private:
  std::shared_ptr<const ServedContent> content_;
  httplib::Server server_;
};

}  // namespace flymation
