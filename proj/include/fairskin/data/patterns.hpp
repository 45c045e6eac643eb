// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>

#include "fairskin/data/labels.hpp"
#include "fairskin/data/sample.hpp"

namespace fairskin {

/// Geometry of one lesion pattern. Lengths are in pixels; `size` and `length`
/// are family specific (spot spacing, bar spacing and length, ring radius,
/// patch half-width, cone radius).
struct PatternGeometry {
  double cx = 0.0;
  double cy = 0.0;
  double size = 0.0;
  double length = 0.0;
};

/// Jitter ranges, expressed for a 16-pixel image and scaled linearly with size.
struct PatternRange {
  double size_lo, size_hi;
  double length_lo, length_hi;
};

inline PatternRange RangeFor(Disease d) {
  switch (d) {
    case Disease::kAllergicContactDermatitis: return {4.0, 6.0, 0.0, 0.0};    // spots
    case Disease::kBasalCellCarcinoma: return {3.0, 4.0, 8.0, 11.0};          // stripes
    case Disease::kLichenPlanus: return {3.0, 4.5, 0.0, 0.0};                 // rings
    case Disease::kPsoriasis: return {2.0, 3.0, 0.0, 0.0};                    // patch
    case Disease::kSquamousCellCarcinoma: return {4.0, 5.5, 0.0, 0.0};        // radial gradient
  }
  return {0, 0, 0, 0};
}

inline double PatternScale(int height, int width) { return std::min(height, width) / 16.0; }

/// Half-extent of the pattern around its centre, used to keep it in frame.
inline double PatternExtent(Disease d, const PatternGeometry& g, double s) {
  switch (d) {
    case Disease::kAllergicContactDermatitis: return g.size / 2.0 + 1.5 * s;
    case Disease::kBasalCellCarcinoma: return std::max(g.size + s, g.length / 2.0);
    case Disease::kLichenPlanus: return g.size + s;
    case Disease::kPsoriasis: return g.size + 0.5;
    case Disease::kSquamousCellCarcinoma: return g.size;
  }
  return 0.0;
}

/// Pattern intensity in [0, 1] at pixel (y, x).
inline double PatternValue(Disease d, const PatternGeometry& g, double s, int y, int x) {
  const double dx = x - g.cx;
  const double dy = y - g.cy;
  switch (d) {
    case Disease::kAllergicContactDermatitis: {
      const double sigma = 0.8 * s;
      const double h = g.size / 2.0;
      double v = 0.0;
      for (double ox : {-h, h})
        for (double oy : {-h, h}) {
          const double r2 = (dx - ox) * (dx - ox) + (dy - oy) * (dy - oy);
          v = std::max(v, std::exp(-r2 / (2.0 * sigma * sigma)));
        }
      return v;
    }
    case Disease::kBasalCellCarcinoma: {
      const double sigma = 0.5 * s;
      double v = 0.0;
      for (double ox : {-g.size, 0.0, g.size}) {
        const double e = dx - ox;
        v = std::max(v, std::exp(-e * e / (2.0 * sigma * sigma)));
      }
      const double wy = std::clamp(g.length / 2.0 - std::abs(dy) + 0.5, 0.0, 1.0);
      return v * wy;
    }
    case Disease::kLichenPlanus: {
      const double sigma = 0.6 * s;
      const double r = std::sqrt(dx * dx + dy * dy);
      return std::exp(-(r - g.size) * (r - g.size) / (2.0 * sigma * sigma));
    }
    case Disease::kPsoriasis:
      return std::clamp(g.size + 0.5 - std::max(std::abs(dx), std::abs(dy)), 0.0, 1.0);
    case Disease::kSquamousCellCarcinoma: {
      const double r = std::sqrt(dx * dx + dy * dy);
      return std::max(0.0, 1.0 - r / g.size);
    }
  }
  return 0.0;
}

inline Image RenderPattern(Disease d, const PatternGeometry& g, int height, int width) {
  Image img(height, width);
  const double s = PatternScale(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) img.at(y, x) = PatternValue(d, g, s, y, x);
  return img;
}

/// Skin-tone band of the background intensity for each race.
struct ToneBand {
  double lo, hi;
};

inline ToneBand ToneBandFor(Race r) {
  switch (r) {
    case Race::kCaucasian: return {0.70, 0.90};
    case Race::kAsian: return {0.45, 0.65};
    case Race::kAfrican: return {0.15, 0.35};
  }
  return {0, 0};
}

/// Lesion contrast band and polarity: lesions darken lighter tones and lighten
/// the darkest tone, with lower contrast on the darkest tone.
struct LesionStyle {
  double contrast_lo, contrast_hi;
  double polarity;
};

inline LesionStyle LesionStyleFor(Race r) {
  if (r == Race::kAfrican) return {0.12, 0.22, +1.0};
  return {0.20, 0.30, -1.0};
}

/// Race whose tone band contains (or is nearest to) a background intensity.
inline Race RaceFromTone(double background) {
  const double cut_low = (ToneBandFor(Race::kAfrican).hi + ToneBandFor(Race::kAsian).lo) / 2.0;
  const double cut_high = (ToneBandFor(Race::kAsian).hi + ToneBandFor(Race::kCaucasian).lo) / 2.0;
  if (background >= cut_high) return Race::kCaucasian;
  if (background >= cut_low) return Race::kAsian;
  return Race::kAfrican;
}

}  // namespace fairskin
