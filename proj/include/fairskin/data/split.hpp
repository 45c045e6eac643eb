// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "fairskin/data/sample.hpp"
#include "fairskin/numerics/rng.hpp"

namespace fairskin {

struct DatasetSplit {
  std::vector<Sample> train;
  std::vector<Sample> validation;
  std::vector<Sample> test;
};

struct StratumSizes {
  int train, validation, test;
};

/// Per-stratum 8:1:1 sizes: val = test = round(n / 10), at least 1 each once
/// n >= 3; strata with fewer than 3 samples go entirely to train.
inline StratumSizes SplitSizes(int n) {
  if (n < 3) return {n, 0, 0};
  const int tenth = std::max(1, static_cast<int>(std::lround(n / 10.0)));
  return {n - 2 * tenth, tenth, tenth};
}

/// Stratified split by (race, disease). Each stratum is shuffled with its own
/// named stream; test takes the first slice, validation the next.
inline DatasetSplit Split811(const std::vector<Sample>& samples, const Rng& rng) {
  std::array<std::vector<std::size_t>, kNumClasses> strata;
  for (std::size_t i = 0; i < samples.size(); ++i) strata[static_cast<std::size_t>(samples[i].label())].push_back(i);
  DatasetSplit out;
  for (int y = 0; y < kNumClasses; ++y) {
    auto& idx = strata[static_cast<std::size_t>(y)];
    Rng stream = rng.Split("stratum/" + std::to_string(y));
    stream.Shuffle(idx.begin(), idx.end());
    const StratumSizes sz = SplitSizes(static_cast<int>(idx.size()));
    std::size_t k = 0;
    for (int i = 0; i < sz.test; ++i) out.test.push_back(samples[idx[k++]]);
    for (int i = 0; i < sz.validation; ++i) out.validation.push_back(samples[idx[k++]]);
    for (int i = 0; i < sz.train; ++i) out.train.push_back(samples[idx[k++]]);
  }
  return out;
}

}  // namespace fairskin
