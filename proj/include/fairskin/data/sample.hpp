// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "fairskin/data/labels.hpp"
#include "fairskin/numerics/linalg.hpp"

namespace fairskin {

/// Single-channel image, row-major, pixels nominally in [0, 1].
struct Image {
  int height = 0;
  int width = 0;
  std::vector<double> pixels;

  Image() = default;
  Image(int h, int w, double fill = 0.0)
      : height(h), width(w), pixels(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), fill) {}

  std::size_t size() const { return pixels.size(); }
  double& at(int y, int x) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  double at(int y, int x) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

  friend bool operator==(const Image&, const Image&) = default;
};

enum class Origin : int { kReal = 0, kGenerated = 1 };

/// One labeled image (x_i, r_i, d_i).
struct Sample {
  Image image;
  Race race = Race::kAsian;
  Disease disease = Disease::kAllergicContactDermatitis;
  Origin origin = Origin::kReal;

  int label() const { return ClassIndex(race, disease); }

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// N_{r,d}.
class ClassCountTable {
 public:
  ClassCountTable() { counts_.fill(0); }

  int at(Race r, Disease d) const { return counts_[static_cast<std::size_t>(ClassIndex(r, d))]; }
  int at(int y) const { return counts_[static_cast<std::size_t>(y)]; }
  void set(Race r, Disease d, int n) {
    if (n < 0) throw PreconditionError("class count must be non-negative");
    counts_[static_cast<std::size_t>(ClassIndex(r, d))] = n;
  }
  void set(int y, int n) { set(RaceOfClass(y), DiseaseOfClass(y), n); }

  int race_total(Race r) const {
    int s = 0;
    for (Disease d : kAllDiseases) s += at(r, d);
    return s;
  }
  int total() const {
    int s = 0;
    for (int n : counts_) s += n;
    return s;
  }

  static ClassCountTable FromSamples(const std::vector<Sample>& samples) {
    ClassCountTable t;
    for (const auto& s : samples) ++t.counts_[static_cast<std::size_t>(s.label())];
    return t;
  }

  const ClassArray<int>& raw() const { return counts_; }
  friend bool operator==(const ClassCountTable&, const ClassCountTable&) = default;

 private:
  ClassArray<int> counts_;
};

/// Class counts of the Fitzpatrick17k subset used as the default long tail.
inline ClassCountTable DefaultCountProfile() {
  ClassCountTable t;
  using D = Disease;
  // columns: acd, bcc, lp, pso, scc
  const std::array<std::array<int, kNumDiseases>, kNumRaces> rows = {{
      {108, 154, 183, 145, 166},  // asian
      {25, 12, 120, 87, 56},      // african
      {295, 302, 181, 412, 329},  // caucasian
  }};
  for (Race r : kAllRaces)
    for (D d : kAllDiseases)
      t.set(r, d, rows[static_cast<std::size_t>(Index(r))][static_cast<std::size_t>(Index(d))]);
  return t;
}

/// Stacks sample images into an (n x H*W) matrix.
inline Matrix StackImages(const std::vector<Sample>& samples) {
  if (samples.empty()) return Matrix(0, 0);
  const auto dim = static_cast<Eigen::Index>(samples.front().image.size());
  Matrix m(static_cast<Eigen::Index>(samples.size()), dim);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (static_cast<Eigen::Index>(samples[i].image.size()) != dim)
      throw PreconditionError("images of different sizes in one batch");
    for (Eigen::Index j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(i), j) = samples[i].image.pixels[static_cast<std::size_t>(j)];
  }
  return m;
}

}  // namespace fairskin
