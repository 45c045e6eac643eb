// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "fairskin/data/sample.hpp"

namespace fairskin {

/// 8-bit grayscale raster as stored in a binary PGM.
struct GrayImage8 {
  int height = 0;
  int width = 0;
  std::vector<unsigned char> pixels;
};

/// Parses a binary P5 PGM with maxval 255. Comments are allowed in the header.
inline GrayImage8 ParsePgm(const std::string& bytes) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&]() -> long {
    skip_ws();
    const std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (start == pos) throw PreconditionError("PGM: expected integer in header");
    return std::stol(bytes.substr(start, pos - start));
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') throw PreconditionError("PGM: missing P5 magic");
  pos = 2;
  const long w = read_int();
  const long h = read_int();
  const long maxval = read_int();
  if (w <= 0 || h <= 0) throw PreconditionError("PGM: non-positive dimensions");
  if (maxval != 255) throw PreconditionError("PGM: maxval must be 255");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
    throw PreconditionError("PGM: malformed header");
  ++pos;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() - pos < n) throw PreconditionError("PGM: truncated pixel data");
  GrayImage8 img{static_cast<int>(h), static_cast<int>(w), {}};
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
  return img;
}

inline GrayImage8 ReadPgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return ParsePgm(bytes);
}

/// Quantizes to 8 bits (round to nearest, clamped) and writes a P5 PGM.
inline void WritePgm(const std::filesystem::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write " + path.string());
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  for (double v : img.pixels) {
    const auto q = static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    out.put(static_cast<char>(q));
  }
}

/// Bilinear resample to (height, width) with pixel-centre alignment; values / 255.
inline Image ToUnitImage(const GrayImage8& src, int height, int width) {
  Image out(height, width);
  auto px = [&](int y, int x) { return src.pixels[static_cast<std::size_t>(y) * src.width + x] / 255.0; };
  for (int y = 0; y < height; ++y) {
    const double sy = std::clamp((y + 0.5) * src.height / height - 0.5, 0.0, src.height - 1.0);
    const int y0 = static_cast<int>(std::floor(sy));
    const int y1 = std::min(y0 + 1, src.height - 1);
    const double fy = sy - y0;
    for (int x = 0; x < width; ++x) {
      const double sx = std::clamp((x + 0.5) * src.width / width - 0.5, 0.0, src.width - 1.0);
      const int x0 = static_cast<int>(std::floor(sx));
      const int x1 = std::min(x0 + 1, src.width - 1);
      const double fx = sx - x0;
      const double top = px(y0, x0) * (1 - fx) + px(y0, x1) * fx;
      const double bottom = px(y1, x0) * (1 - fx) + px(y1, x1) * fx;
      out.at(y, x) = top * (1 - fy) + bottom * fy;
    }
  }
  return out;
}

}  // namespace fairskin
