// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "fairskin/data/sample.hpp"

namespace fairskin {

enum class WeightScheme { kUniform, kCbrs, kSqrs };

inline std::string_view SchemeName(WeightScheme s) {
  switch (s) {
    case WeightScheme::kUniform: return "uniform";
    case WeightScheme::kCbrs: return "cbrs";
    case WeightScheme::kSqrs: return "sqrs";
  }
  return "?";
}

/// How class weights enter diffusion training: as sampling probabilities or
/// as per-sample loss multipliers on uniformly drawn batches.
enum class WeightMode { kSample, kLoss };

/// Per-(race, disease) weights w_{r,d}, rescaled so that the mean per-sample
/// weight over the corpus they were built from is 1. Classes with no samples
/// carry no weight.
class ClassWeights {
 public:
  WeightScheme scheme() const { return scheme_; }
  bool has(int y) const { return weights_[static_cast<std::size_t>(y)].has_value(); }
  double at(int y) const {
    const auto& w = weights_[static_cast<std::size_t>(y)];
    if (!w) throw MissingWeightError("no weight for class " + ClassName(y));
    return *w;
  }
  double at(Race r, Disease d) const { return at(ClassIndex(r, d)); }

  /// Builds weights proportional to N_{r,d}^{-exponent}.
  static ClassWeights FromCounts(const ClassCountTable& counts, WeightScheme scheme) {
    if (counts.total() == 0) throw EmptyCorpusError("class weights: all class counts are zero");
    const double exponent = scheme == WeightScheme::kCbrs ? 1.0 : scheme == WeightScheme::kSqrs ? 0.5 : 0.0;
    ClassWeights w;
    w.scheme_ = scheme;
    double mass = 0.0;
    for (int y = 0; y < kNumClasses; ++y) {
      const int n = counts.at(y);
      if (n == 0) continue;
      const double raw = std::pow(static_cast<double>(n), -exponent);
      w.weights_[static_cast<std::size_t>(y)] = raw;
      mass += n * raw;
    }
    const double scale = counts.total() / mass;
    for (auto& v : w.weights_)
      if (v) *v *= scale;
    return w;
  }

  void WriteCsv(std::ostream& out) const {
    out << "race,disease,weight\n";
    out.precision(17);
    for (int y = 0; y < kNumClasses; ++y)
      if (has(y)) out << RaceName(RaceOfClass(y)) << "," << DiseaseCode(DiseaseOfClass(y)) << "," << at(y) << "\n";
  }

 private:
  WeightScheme scheme_ = WeightScheme::kUniform;
  ClassArray<std::optional<double>> weights_{};
};

inline ClassWeights CbrsWeights(const ClassCountTable& counts) {
  return ClassWeights::FromCounts(counts, WeightScheme::kCbrs);
}
inline ClassWeights SqrsWeights(const ClassCountTable& counts) {
  return ClassWeights::FromCounts(counts, WeightScheme::kSqrs);
}
inline ClassWeights UniformWeights(const ClassCountTable& counts) {
  return ClassWeights::FromCounts(counts, WeightScheme::kUniform);
}

inline double PerSampleLossWeight(const Sample& s, const ClassWeights& w) { return w.at(s.label()); }

}  // namespace fairskin
