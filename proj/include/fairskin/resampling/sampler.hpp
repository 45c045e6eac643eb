// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <vector>

#include "fairskin/numerics/rng.hpp"
#include "fairskin/resampling/weights.hpp"

namespace fairskin {

/// Endless with-replacement draw of sample indices, index i having probability
/// w_{class(i)} / sum_j w_{class(j)}.
class WeightedSampler {
 public:
  WeightedSampler(const std::vector<Sample>& samples, const ClassWeights& weights, Rng rng)
      : rng_(std::move(rng)) {
    std::vector<double> w(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) w[i] = weights.at(samples[i].label());
    Build(w);
  }

  /// Sampler over arbitrary non-negative per-index weights.
  WeightedSampler(const std::vector<double>& per_index, Rng rng) : rng_(std::move(rng)) { Build(per_index); }

  std::size_t Next() {
    const double u = rng_.Uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  }

  double Probability(std::size_t i) const {
    const double prev = i == 0 ? 0.0 : cumulative_[i - 1];
    return (cumulative_[i] - prev) / cumulative_.back();
  }

  std::size_t size() const { return cumulative_.size(); }

 private:
  void Build(const std::vector<double>& w) {
    if (w.empty()) throw EmptyCorpusError("weighted sampler: no samples");
    cumulative_.resize(w.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!(w[i] >= 0.0)) throw PreconditionError("weighted sampler: negative weight");
      acc += w[i];
      cumulative_[i] = acc;
    }
    if (!(acc > 0.0)) throw PreconditionError("weighted sampler: zero total weight");
  }

  Rng rng_;
  std::vector<double> cumulative_;
};

}  // namespace fairskin
