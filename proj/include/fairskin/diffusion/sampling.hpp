// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fairskin/data/sample.hpp"
#include "fairskin/diffusion/denoiser.hpp"
#include "fairskin/diffusion/schedule.hpp"

namespace fairskin {

/// Ancestral sampling of `n` images of label y. Image i draws all of its noise
/// from the stream `sample/i` of `rng`:
///   x_T ~ N(0, I)
///   x_{t-1} = (x_t - (1 - a_t) / sqrt(1 - abar_t) * eps) / sqrt(a_t) + sqrt(beta_t) z,  z = 0 at t = 1
/// The chain runs in model space; outputs are mapped back and clamped to [0, 1].
inline Matrix SampleImages(const DenoiserModel& m, const NoiseSchedule& sched, int label, int n, const Rng& rng) {
  if (n < 1) throw PreconditionError("sample: n must be at least 1");
  if (label < 0 || label >= m.config.num_classes) throw PreconditionError("sample: label out of range");
  const int dim = m.config.image_dim;
  std::vector<Rng> streams;
  streams.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) streams.push_back(rng.Split("sample/" + std::to_string(i)));

  Matrix x(n, dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) x(i, j) = streams[static_cast<std::size_t>(i)].Normal();

  const std::vector<int> labels(static_cast<std::size_t>(n), label);
  std::vector<int> ts(static_cast<std::size_t>(n));
  for (int t = sched.steps(); t >= 1; --t) {
    std::fill(ts.begin(), ts.end(), t);
    const Matrix eps = PredictNoise(m, x, ts, labels);
    const double a = sched.alpha(t);
    const double coef = (1.0 - a) / std::sqrt(1.0 - sched.alpha_bar(t));
    x = (x - coef * eps) / std::sqrt(a);
    if (t > 1) {
      const double sigma = std::sqrt(sched.beta(t));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < dim; ++j) x(i, j) += sigma * streams[static_cast<std::size_t>(i)].Normal();
    }
  }
  return FromModelSpace(x);
}

inline std::vector<Sample> SampleAsSamples(const DenoiserModel& m, const NoiseSchedule& sched, int label, int n,
                                           const Rng& rng, int height, int width) {
  if (height * width != m.config.image_dim) throw PreconditionError("sample: image shape does not match model");
  const Matrix x = SampleImages(m, sched, label, n, rng);
  std::vector<Sample> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Sample& s = out[static_cast<std::size_t>(i)];
    s.image = Image(height, width);
    for (int j = 0; j < m.config.image_dim; ++j) s.image.pixels[static_cast<std::size_t>(j)] = x(i, j);
    s.race = RaceOfClass(label);
    s.disease = DiseaseOfClass(label);
    s.origin = Origin::kGenerated;
  }
  return out;
}

}  // namespace fairskin
