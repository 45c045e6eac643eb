// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "fairskin/data/sample.hpp"
#include "fairskin/diffusion/sampling.hpp"

namespace fairskin {

/// Number of synthetic images m_{r,d} to generate per class.
class AugmentationPlan {
 public:
  AugmentationPlan() { counts_.fill(0); }

  int at(int y) const { return counts_[static_cast<std::size_t>(y)]; }
  int at(Race r, Disease d) const { return at(ClassIndex(r, d)); }
  void set(int y, int n) {
    if (n < 0) throw PreconditionError("augmentation plan: negative count");
    counts_[static_cast<std::size_t>(y)] = n;
  }
  int total() const { return std::accumulate(counts_.begin(), counts_.end(), 0); }
  int race_total(Race r) const {
    int s = 0;
    for (Disease d : kAllDiseases) s += at(r, d);
    return s;
  }
  friend bool operator==(const AugmentationPlan&, const AugmentationPlan&) = default;

  /// M spread over the 15 classes; the remainder goes one each to the lowest class indices.
  static AugmentationPlan Uniform(int total) {
    CheckTotal(total);
    AugmentationPlan p;
    for (int y = 0; y < kNumClasses; ++y) p.set(y, total / kNumClasses + (y < total % kNumClasses ? 1 : 0));
    return p;
  }

  /// Race shares from weights (largest remainder, ties to the lower race
  /// index), then an equal split over diseases with the remainder to the
  /// lowest disease indices.
  static AugmentationPlan Proportions(int total, const RaceArray<double>& race_weights) {
    CheckTotal(total);
    double sum = 0.0;
    for (double w : race_weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw PreconditionError("augmentation plan: invalid race proportion");
      sum += w;
    }
    if (!(sum > 0.0)) throw PreconditionError("augmentation plan: race proportions sum to zero");
    RaceArray<int> share{};
    std::array<std::pair<double, int>, kNumRaces> remainders;
    int assigned = 0;
    for (int r = 0; r < kNumRaces; ++r) {
      const double exact = total * race_weights[static_cast<std::size_t>(r)] / sum;
      // Tolerate representation error so that e.g. 7500 * 0.3 lands on 2250.
      const double fl = std::floor(exact + 1e-9);
      share[static_cast<std::size_t>(r)] = static_cast<int>(fl);
      assigned += static_cast<int>(fl);
      remainders[static_cast<std::size_t>(r)] = {-(exact - fl), r};
    }
    std::sort(remainders.begin(), remainders.end());
    for (int i = 0; assigned < total; ++i, ++assigned) ++share[static_cast<std::size_t>(remainders[static_cast<std::size_t>(i)].second)];
    AugmentationPlan p;
    for (Race r : kAllRaces) {
      const int m = share[static_cast<std::size_t>(Index(r))];
      for (Disease d : kAllDiseases) p.set(ClassIndex(r, d), m / kNumDiseases + (Index(d) < m % kNumDiseases ? 1 : 0));
    }
    return p;
  }

  /// M spread in proportion to the class counts (largest remainder, ties to
  /// the lower class index); classes with no samples get none.
  static AugmentationPlan MatchCounts(int total, const ClassCountTable& counts) {
    CheckTotal(total);
    if (counts.total() == 0) throw EmptyCorpusError("augmentation plan: all class counts are zero");
    AugmentationPlan p;
    std::array<std::pair<double, int>, kNumClasses> remainders;
    int assigned = 0;
    for (int y = 0; y < kNumClasses; ++y) {
      const double exact = static_cast<double>(total) * counts.at(y) / counts.total();
      const int fl = static_cast<int>(std::floor(exact + 1e-9));
      p.set(y, fl);
      assigned += fl;
      remainders[static_cast<std::size_t>(y)] = {-(exact - fl), y};
    }
    std::sort(remainders.begin(), remainders.end());
    for (int i = 0; assigned < total; ++i, ++assigned) {
      const int y = remainders[static_cast<std::size_t>(i)].second;
      p.set(y, p.at(y) + 1);
    }
    return p;
  }

  /// Fills the smallest classes first so that real + synthetic counts are as
  /// level as M allows; leftover images go one each to the classes with the
  /// smallest combined counts, ties to the lower class index.
  static AugmentationPlan Balance(int total, const ClassCountTable& train_counts) {
    CheckTotal(total);
    std::array<int, kNumClasses> order;
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return train_counts.at(a) < train_counts.at(b); });
    // Largest level L with sum_y max(0, L - n_y) <= total.
    long long level = train_counts.at(order[0]);
    long long used = 0;
    int k = 1;
    while (true) {
      const long long next = k < kNumClasses ? train_counts.at(order[static_cast<std::size_t>(k)]) : -1;
      const long long room = k < kNumClasses ? (next - level) * k : -1;
      if (k < kNumClasses && used + room <= total) {
        used += room;
        level = next;
        ++k;
        continue;
      }
      const long long rise = (total - used) / k;
      level += rise;
      used += rise * k;
      break;
    }
    AugmentationPlan p;
    for (int y = 0; y < kNumClasses; ++y) p.set(y, static_cast<int>(std::max<long long>(0, level - train_counts.at(y))));
    long long left = total - used;
    for (int i = 0; left > 0; ++i, --left) {
      const int y = order[static_cast<std::size_t>(i)];
      p.set(y, p.at(y) + 1);
    }
    return p;
  }

 private:
  static void CheckTotal(int total) {
    if (total < 0) throw PreconditionError("augmentation plan: total must be non-negative");
  }
  ClassArray<int> counts_;
};

/// Real samples followed by plan.at(y) generated samples per class, class by
/// class. Class y draws from the stream `gen/<y>` of `rng`.
inline std::vector<Sample> BuildAugmentedSet(const std::vector<Sample>& real, const DenoiserModel& dm,
                                             const NoiseSchedule& sched, const AugmentationPlan& plan, const Rng& rng,
                                             int height, int width) {
  std::vector<Sample> out = real;
  out.reserve(real.size() + static_cast<std::size_t>(plan.total()));
  for (int y = 0; y < kNumClasses; ++y) {
    if (plan.at(y) == 0) continue;
    auto gen = SampleAsSamples(dm, sched, y, plan.at(y), rng.Split("gen/" + std::to_string(y)), height, width);
    out.insert(out.end(), std::make_move_iterator(gen.begin()), std::make_move_iterator(gen.end()));
  }
  return out;
}

}  // namespace fairskin
