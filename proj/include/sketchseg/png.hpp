#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <zlib.h>

#include "sketchseg/io.hpp"
#include "sketchseg/raster.hpp"

namespace sketchseg {

namespace detail {

inline void push_be32(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>(v & 0xFF));
}

inline void push_chunk(std::string& out, const char type[4],
                       const std::string& payload) {
  push_be32(out, static_cast<uint32_t>(payload.size()));
  std::string body(type, 4);
  body += payload;
  out += body;
  const uint32_t crc = static_cast<uint32_t>(
      ::crc32(0, reinterpret_cast<const Bytef*>(body.data()),
              static_cast<uInt>(body.size())));
  push_be32(out, crc);
}

}  // namespace detail

/// Encodes an 8-bit RGB image as a PNG byte stream (filter 0 on every row,
/// zlib-compressed). Output is deterministic for identical pixels.
inline std::string png_encode(const Image<Rgb>& img) {
  if (img.width <= 0 || img.height <= 0)
    throw std::invalid_argument("image dimensions must be positive");

  std::string raw;
  raw.reserve(static_cast<size_t>(img.height) * (1 + 3 * img.width));
  for (int y = 0; y < img.height; ++y) {
    raw.push_back('\0');  // per-row filter byte: none
    for (int x = 0; x < img.width; ++x) {
      const Rgb& p = img.at(x, y);
      raw.push_back(static_cast<char>(p.r));
      raw.push_back(static_cast<char>(p.g));
      raw.push_back(static_cast<char>(p.b));
    }
  }

  uLongf bound = ::compressBound(static_cast<uLong>(raw.size()));
  std::vector<Bytef> compressed(bound);
  if (::compress2(compressed.data(), &bound,
                  reinterpret_cast<const Bytef*>(raw.data()),
                  static_cast<uLong>(raw.size()), 9) != Z_OK)
    throw std::runtime_error("deflate failed");

  std::string out("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  detail::push_be32(ihdr, static_cast<uint32_t>(img.width));
  detail::push_be32(ihdr, static_cast<uint32_t>(img.height));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // color type: truecolor
  ihdr.push_back(0);   // compression
  ihdr.push_back(0);   // filter method
  ihdr.push_back(0);   // no interlace
  detail::push_chunk(out, "IHDR", ihdr);
  detail::push_chunk(
      out, "IDAT",
      std::string(reinterpret_cast<const char*>(compressed.data()), bound));
  detail::push_chunk(out, "IEND", "");
  return out;
}

inline void write_png(const Image<Rgb>& img, const std::string& path) {
  write_text_atomic(path, png_encode(img));
}

}  // namespace sketchseg
