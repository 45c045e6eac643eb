// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "fairskin/diffusion/denoiser.hpp"
#include "fairskin/diffusion/schedule.hpp"

namespace fairskin {

/// Realized timesteps and Gaussian noise for one batch.
struct NoiseDraw {
  std::vector<int> t;
  Matrix eps;
};

inline NoiseDraw DrawNoise(Eigen::Index batch, Eigen::Index dim, int steps, Rng& rng) {
  NoiseDraw d;
  d.t.resize(static_cast<std::size_t>(batch));
  d.eps.resize(batch, dim);
  for (Eigen::Index b = 0; b < batch; ++b) {
    d.t[static_cast<std::size_t>(b)] = 1 + static_cast<int>(rng.Below(static_cast<std::uint64_t>(steps)));
    for (Eigen::Index j = 0; j < dim; ++j) d.eps(b, j) = rng.Normal();
  }
  return d;
}

/// Rows of x_t for a batch of clean images under a noise draw.
inline Matrix NoisedBatch(const NoiseSchedule& sched, const Matrix& x0, const NoiseDraw& draw) {
  Matrix x_t(x0.rows(), x0.cols());
  for (Eigen::Index b = 0; b < x0.rows(); ++b) {
    const double ab = sched.alpha_bar(draw.t[static_cast<std::size_t>(b)]);
    x_t.row(b) = std::sqrt(ab) * x0.row(b) + std::sqrt(1.0 - ab) * draw.eps.row(b);
  }
  return x_t;
}

/// (t / |Y|) sum_{y'} ||eps(y) - eps(y')||^2 for one input, given its outputs
/// under every label (row k = label k).
inline double ClassDiversityTerm(const Eigen::Ref<const Matrix>& per_label, int own_label, int t) {
  const auto num_labels = per_label.rows();
  if (own_label < 0 || own_label >= num_labels) throw PreconditionError("class diversity: label out of range");
  const double scale = static_cast<double>(t) / static_cast<double>(num_labels);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < num_labels; ++k) {
    double sq = 0.0;
    for (Eigen::Index j = 0; j < per_label.cols(); ++j) {
      const double diff = per_label(own_label, j) - per_label(k, j);
      sq += diff * diff;
    }
    acc += sq;
  }
  return scale * acc;
}

struct ObjectiveOptions {
  /// Weight of the class-diversity term; 0 skips the label sweep entirely.
  double gamma = 0.0;
  /// Treat eps_theta(x_t, y') as a constant in the class-diversity term.
  bool stop_gradient = false;
  bool with_gradient = true;
};

struct LossValue {
  double loss_dm = 0.0;
  double loss_r = 0.0;
  double total = 0.0;
  Vector grad;
};

/// L = L_DM + gamma * L_r at fixed noised inputs.
///
/// L_DM = (1/B) sum_b w_b ||eps_b - eps_theta(x_t,b, y_b, t_b)||^2 (w_b = 1 when
/// `weights` is empty); skipped when `eps` is null.
/// L_r = (1/B) sum_b (t_b / |Y|) sum_{y'} ||eps_theta(x_t,b, y_b) - eps_theta(x_t,b, y')||^2.
/// Squared norms are sums over pixels.
inline LossValue EvaluateLosses(const DenoiserModel& m, const Matrix& x_t, std::span<const int> t,
                                std::span<const int> labels, const Matrix* eps, std::span<const double> weights,
                                const ObjectiveOptions& opt) {
  const Eigen::Index batch = x_t.rows();
  if (batch == 0) throw PreconditionError("loss: empty batch");
  if (static_cast<Eigen::Index>(labels.size()) != batch) throw PreconditionError("loss: label count mismatch");
  if (!weights.empty() && static_cast<Eigen::Index>(weights.size()) != batch)
    throw PreconditionError("loss: weight count mismatch");
  const int num_labels = m.config.num_classes;
  const bool sweep = opt.gamma != 0.0;

  std::vector<DenoiserQuery> queries;
  std::vector<Eigen::Index> own_row(static_cast<std::size_t>(batch));
  for (Eigen::Index b = 0; b < batch; ++b) {
    const int y = labels[static_cast<std::size_t>(b)];
    if (y < 0 || y >= num_labels) throw PreconditionError("loss: label out of range");
    if (sweep) {
      own_row[static_cast<std::size_t>(b)] = static_cast<Eigen::Index>(queries.size()) + y;
      for (int k = 0; k < num_labels; ++k) queries.push_back({static_cast<int>(b), k});
    } else {
      own_row[static_cast<std::size_t>(b)] = static_cast<Eigen::Index>(queries.size());
      queries.push_back({static_cast<int>(b), y});
    }
  }
  const DenoiserActivations act = DenoiserForward(m, x_t, t, std::move(queries));
  const Matrix& out = act.out;
  const Eigen::Index dim = out.cols();
  const double inv_b = 1.0 / static_cast<double>(batch);

  LossValue v;
  Matrix d_out;
  if (opt.with_gradient) d_out = Matrix::Zero(out.rows(), dim);

  if (eps != nullptr) {
    for (Eigen::Index b = 0; b < batch; ++b) {
      const double w = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(b)];
      const Eigen::Index r = own_row[static_cast<std::size_t>(b)];
      double sq = 0.0;
      for (Eigen::Index j = 0; j < dim; ++j) {
        const double e = (*eps)(b, j) - out(r, j);
        sq += e * e;
        if (opt.with_gradient) d_out(r, j) += -2.0 * w * inv_b * e;
      }
      v.loss_dm += w * sq;
    }
    v.loss_dm *= inv_b;
  }

  if (sweep) {
    for (Eigen::Index b = 0; b < batch; ++b) {
      const Eigen::Index base = b * num_labels;
      const Eigen::Index r = own_row[static_cast<std::size_t>(b)];
      const int tb = t[static_cast<std::size_t>(b)];
      const double scale = static_cast<double>(tb) / num_labels;
      v.loss_r += ClassDiversityTerm(out.middleRows(base, num_labels), labels[static_cast<std::size_t>(b)], tb);
      if (opt.with_gradient) {
        const double c = 2.0 * opt.gamma * scale * inv_b;
        for (int k = 0; k < num_labels; ++k) {
          if (base + k == r) continue;
          for (Eigen::Index j = 0; j < dim; ++j) {
            const double diff = out(r, j) - out(base + k, j);
            d_out(r, j) += c * diff;
            if (!opt.stop_gradient) d_out(base + k, j) -= c * diff;
          }
        }
      }
    }
    v.loss_r *= inv_b;
  }

  v.total = v.loss_dm + opt.gamma * v.loss_r;
  if (opt.with_gradient) {
    v.grad = Vector::Zero(m.theta.size());
    DenoiserBackward(m, act, d_out, v.grad);
  }
  return v;
}

/// L_DM and its gradient for clean images under a noise draw.
inline LossValue LossDm(const DenoiserModel& m, const NoiseSchedule& sched, const Matrix& x0,
                        std::span<const int> labels, const NoiseDraw& draw, std::span<const double> weights = {}) {
  const Matrix x_t = NoisedBatch(sched, x0, draw);
  return EvaluateLosses(m, x_t, draw.t, labels, &draw.eps, weights, ObjectiveOptions{});
}

/// Class-diversity regularizer L_r (batch mean) and its gradient.
inline LossValue LossCbdm(const DenoiserModel& m, const Matrix& x_t, std::span<const int> t,
                          std::span<const int> labels, bool stop_gradient = false) {
  ObjectiveOptions opt;
  opt.gamma = 1.0;
  opt.stop_gradient = stop_gradient;
  LossValue v = EvaluateLosses(m, x_t, t, labels, nullptr, {}, opt);
  return v;
}

}  // namespace fairskin
