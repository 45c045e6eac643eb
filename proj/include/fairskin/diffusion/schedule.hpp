// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fairskin/numerics/errors.hpp"
#include "fairskin/numerics/linalg.hpp"

namespace fairskin {

/// beta_t, alpha_t = 1 - beta_t and alpha_bar_t = prod_{s<=t} alpha_s for
/// t = 1..T. Index 0 holds alpha_bar_0 = 1.
class NoiseSchedule {
 public:
  NoiseSchedule() = default;

  explicit NoiseSchedule(std::vector<double> betas) {
    if (betas.empty()) throw PreconditionError("noise schedule: T must be positive");
    beta_.assign(1, 0.0);
    alpha_.assign(1, 1.0);
    alpha_bar_.assign(1, 1.0);
    for (std::size_t i = 0; i < betas.size(); ++i) {
      const double b = betas[i];
      if (!(b > 0.0 && b < 1.0)) throw PreconditionError("noise schedule: beta must lie in (0, 1)");
      if (i > 0 && b < betas[i - 1]) throw PreconditionError("noise schedule: betas must be non-decreasing");
      beta_.push_back(b);
      alpha_.push_back(1.0 - b);
      alpha_bar_.push_back(alpha_bar_.back() * (1.0 - b));
    }
  }

  static NoiseSchedule Linear(int steps, double beta_start, double beta_end) {
    if (steps < 1) throw PreconditionError("noise schedule: T must be positive");
    std::vector<double> b(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i)
      b[static_cast<std::size_t>(i)] = steps == 1 ? beta_start : beta_start + (beta_end - beta_start) * i / (steps - 1);
    return NoiseSchedule(std::move(b));
  }

  /// Linear schedule with the 1000-step endpoints (1e-4, 0.02) rescaled by
  /// 1000 / T, so that alpha_bar_T is close to 0 for short chains. The end
  /// value is capped at 0.999 for T <= 20.
  static NoiseSchedule ScaledLinear(int steps) {
    const double scale = 1000.0 / steps;
    return Linear(steps, 1e-4 * scale, std::min(0.02 * scale, 0.999));
  }

  int steps() const { return static_cast<int>(beta_.size()) - 1; }
  double beta(int t) const { return beta_.at(Checked(t)); }
  double alpha(int t) const { return alpha_.at(Checked(t)); }
  double alpha_bar(int t) const {
    if (t < 0 || t > steps()) throw PreconditionError("timestep out of range");
    return alpha_bar_[static_cast<std::size_t>(t)];
  }

 private:
  std::size_t Checked(int t) const {
    if (t < 1 || t > steps()) {
      throw PreconditionError("timestep " + std::to_string(t) + " outside [1, " + std::to_string(steps()) + "]");
    }
    return static_cast<std::size_t>(t);
  }

  std::vector<double> beta_, alpha_, alpha_bar_;
};

/// The diffusion process runs on images mapped from [0, 1] to [-1, 1].
inline Matrix ToModelSpace(const Matrix& unit) { return (2.0 * unit.array() - 1.0).matrix(); }
inline Matrix FromModelSpace(const Matrix& model) { return ((model.array() + 1.0) * 0.5).cwiseMax(0.0).cwiseMin(1.0).matrix(); }

inline std::vector<double> AlphaBarTable(const NoiseSchedule& sched) {
  std::vector<double> ab(static_cast<std::size_t>(sched.steps()) + 1);
  for (int t = 0; t <= sched.steps(); ++t) ab[static_cast<std::size_t>(t)] = sched.alpha_bar(t);
  return ab;
}

enum class ScheduleKind { kScaledLinear = 0, kLinear = 1 };

/// kLinear is the 1000-step convention (1e-4, 0.02) applied verbatim to T steps.
inline NoiseSchedule MakeSchedule(ScheduleKind kind, int steps) {
  return kind == ScheduleKind::kLinear ? NoiseSchedule::Linear(steps, 1e-4, 0.02) : NoiseSchedule::ScaledLinear(steps);
}

/// x_t = sqrt(alpha_bar) x0 + sqrt(1 - alpha_bar) eps for an explicit alpha_bar.
inline Vector ForwardNoiseAt(double alpha_bar, const Vector& x0, const Vector& eps) {
  if (x0.size() != eps.size()) throw PreconditionError("forward_noise: noise shape mismatch");
  return std::sqrt(alpha_bar) * x0 + std::sqrt(1.0 - alpha_bar) * eps;
}

inline Vector ForwardNoise(const NoiseSchedule& sched, const Vector& x0, int t, const Vector& eps) {
  if (t < 1 || t > sched.steps()) throw PreconditionError("forward_noise: timestep out of range");
  return ForwardNoiseAt(sched.alpha_bar(t), x0, eps);
}

}  // namespace fairskin
