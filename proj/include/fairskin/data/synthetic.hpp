// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "fairskin/data/patterns.hpp"
#include "fairskin/data/sample.hpp"
#include "fairskin/numerics/rng.hpp"

namespace fairskin {

struct SyntheticConfig {
  int height = 16;
  int width = 16;
  double noise_sigma = 0.03;
  /// Fraction of the in-frame range over which the lesion centre may move.
  double position_jitter = 0.25;
};

inline void ValidateImageSize(int height, int width) {
  if (height < 8 || width < 8 || height > 32 || width > 32) {
    throw PreconditionError("image size must be between 8x8 and 32x32, got " + std::to_string(height) +
                            "x" + std::to_string(width));
  }
}

/// Draws one synthetic image of class (race, disease).
inline Image DrawSyntheticImage(Race race, Disease disease, const SyntheticConfig& cfg, Rng& rng) {
  const double s = PatternScale(cfg.height, cfg.width);
  const PatternRange range = RangeFor(disease);
  PatternGeometry g;
  g.size = s * rng.Uniform(range.size_lo, range.size_hi);
  g.length = s * rng.Uniform(range.length_lo, range.length_hi);
  const double extent = PatternExtent(disease, g, s);
  auto center = [&](int n) {
    const double mid = (n - 1) / 2.0;
    const double half = std::max(0.0, mid - extent) * cfg.position_jitter;
    return half > 0.0 ? rng.Uniform(mid - half, mid + half) : mid;
  };
  g.cx = center(cfg.width);
  g.cy = center(cfg.height);

  const ToneBand tone = ToneBandFor(race);
  const LesionStyle style = LesionStyleFor(race);
  const double base = rng.Uniform(tone.lo, tone.hi);
  const double contrast = rng.Uniform(style.contrast_lo, style.contrast_hi);

  Image img(cfg.height, cfg.width);
  for (int y = 0; y < cfg.height; ++y) {
    for (int x = 0; x < cfg.width; ++x) {
      const double v = base + style.polarity * contrast * PatternValue(disease, g, s, y, x) +
                       cfg.noise_sigma * rng.Normal();
      img.at(y, x) = std::clamp(v, 0.0, 1.0);
    }
  }
  return img;
}

/// Generates exactly counts(r, d) samples per class. Each class draws from its
/// own named stream, so strata are independent of one another.
inline std::vector<Sample> GenerateSynthetic(const ClassCountTable& counts, const Rng& rng,
                                             const SyntheticConfig& cfg = {}) {
  ValidateImageSize(cfg.height, cfg.width);
  if (counts.total() == 0) throw EmptyCorpusError("generate_synthetic: all class counts are zero");
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(counts.total()));
  for (int y = 0; y < kNumClasses; ++y) {
    Rng stream = rng.Split("class/" + std::to_string(y));
    for (int i = 0; i < counts.at(y); ++i) {
      Sample s;
      s.race = RaceOfClass(y);
      s.disease = DiseaseOfClass(y);
      s.image = DrawSyntheticImage(s.race, s.disease, cfg, stream);
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace fairskin
