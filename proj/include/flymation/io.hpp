#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "flymation/error.hpp"

namespace flymation {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return ss.str();
}

inline void write_bytes(const std::filesystem::path& path, std::span<const char> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
  write_bytes(path, std::span(text.data(), text.size()));
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create directory '" + dir.string() + "'" + (ec ? ": " + ec.message() : ""));
}

}  // namespace flymation
