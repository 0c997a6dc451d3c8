#pragma once

#include <zlib.h>

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "flymation/error.hpp"
#include "flymation/raster.hpp"

namespace flymation {

namespace detail {

inline void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_chunk(std::vector<std::uint8_t>& out, std::string_view type,
                      std::span<const std::uint8_t> data) {
  put_be32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t type_at = out.size();
  out.insert(out.end(), type.begin(), type.end());
  out.insert(out.end(), data.begin(), data.end());
  const uLong crc = crc32(0L, out.data() + type_at, static_cast<uInt>(out.size() - type_at));
  put_be32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace detail

inline constexpr int kPngCompressionLevel = 6;

/// 8-bit RGBA PNG, filter type 0 on every row, zlib level 6. Same framebuffer
/// in, same bytes out.
inline std::vector<std::uint8_t> encode_png(const Framebuffer& fb) {
  const std::size_t stride = static_cast<std::size_t>(fb.width) * 4;
  std::vector<std::uint8_t> raw;
  raw.reserve((stride + 1) * fb.height);
  for (int y = 0; y < fb.height; ++y) {
    raw.push_back(0);
    const auto row = fb.color.begin() + static_cast<std::ptrdiff_t>(y * stride);
    raw.insert(raw.end(), row, row + static_cast<std::ptrdiff_t>(stride));
  }
  uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> packed(packed_size);
  if (compress2(packed.data(), &packed_size, raw.data(), static_cast<uLong>(raw.size()),
                kPngCompressionLevel) != Z_OK)
    throw Error("PNG deflate failed");
  packed.resize(packed_size);

  std::vector<std::uint8_t> out{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<std::uint8_t> ihdr;
  detail::put_be32(ihdr, static_cast<std::uint32_t>(fb.width));
  detail::put_be32(ihdr, static_cast<std::uint32_t>(fb.height));
  ihdr.insert(ihdr.end(), {8, 6, 0, 0, 0});  // depth 8, RGBA, deflate, filter 0, no interlace
  detail::put_chunk(out, "IHDR", ihdr);
  detail::put_chunk(out, "IDAT", packed);
  detail::put_chunk(out, "IEND", {});
  return out;
}

}  // namespace flymation
