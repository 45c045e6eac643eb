// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fairskin/numerics/errors.hpp"
#include "fairskin/numerics/rng.hpp"

namespace fairskin {

using ScalarFn = std::function<double(std::span<const double>)>;

/// Compares `analytic` against central differences of `f` at the sampled
/// indices. Returns max |a - n| / max(1, |a|, |n|).
inline double GradCheck(const ScalarFn& f, std::span<const double> params,
                        std::span<const double> analytic, std::span<const std::size_t> indices,
                        double h = 1e-5) {
  if (analytic.size() != params.size()) throw PreconditionError("grad_check: gradient size mismatch");
  std::vector<double> probe(params.begin(), params.end());
  double worst = 0.0;
  for (std::size_t idx : indices) {
    if (idx >= probe.size()) throw PreconditionError("grad_check: index out of range");
    const double saved = probe[idx];
    probe[idx] = saved + h;
    const double up = f(probe);
    probe[idx] = saved - h;
    const double down = f(probe);
    probe[idx] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("grad_check: non-finite function value at index " + std::to_string(idx));
    }
    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic[idx];
    const double err = std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
    worst = std::max(worst, err);
  }
  return worst;
}

/// `count` distinct indices from [0, n), or all of them if count >= n.
inline std::vector<std::size_t> SampleIndices(std::size_t n, std::size_t count, Rng& rng) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  if (count >= n) return all;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.Below(n - i));
    std::swap(all[i], all[j]);
  }
  all.resize(count);
  return all;
}

}  // namespace fairskin
