// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "fairskin/data/labels.hpp"
#include "fairskin/numerics/checkpoint.hpp"
#include "fairskin/numerics/nn.hpp"

namespace fairskin {

struct ClassifierConfig {
  int input_dim = 256;
  int hidden1 = 128;
  int hidden2 = 64;
  int num_outputs = kNumDiseases;
  friend bool operator==(const ClassifierConfig&, const ClassifierConfig&) = default;
};

struct ClassifierLayout {
  explicit ClassifierLayout(const ClassifierConfig& c) {
    Eigen::Index at = 0;
    auto take = [&](Eigen::Index n) {
      const Eigen::Index start = at;
      at += n;
      return start;
    };
    w1 = take(static_cast<Eigen::Index>(c.input_dim) * c.hidden1);
    b1 = take(c.hidden1);
    w2 = take(static_cast<Eigen::Index>(c.hidden1) * c.hidden2);
    b2 = take(c.hidden2);
    w3 = take(static_cast<Eigen::Index>(c.hidden2) * c.num_outputs);
    b3 = take(c.num_outputs);
    total = at;
  }
  Eigen::Index w1, b1, w2, b2, w3, b3, total;
};

/// MLP input -> hidden1 -> hidden2 -> logits with SiLU. The hidden2
/// activations are the feature map used for FID and IS.
struct ClassifierModel {
  ClassifierConfig config;
  Vector theta;

  ClassifierModel() = default;
  explicit ClassifierModel(const ClassifierConfig& cfg) : config(cfg), theta(Vector::Zero(ClassifierLayout(cfg).total)) {}

  static ClassifierModel Initialize(const ClassifierConfig& cfg, Rng rng) {
    ClassifierModel m(cfg);
    const ClassifierLayout l(cfg);
    InitLecun(m.block(l.w1, cfg.input_dim, cfg.hidden1), rng);
    InitLecun(m.block(l.w2, cfg.hidden1, cfg.hidden2), rng);
    InitLecun(m.block(l.w3, cfg.hidden2, cfg.num_outputs), rng);
    return m;
  }

  MatrixMap block(Eigen::Index offset, Eigen::Index rows, Eigen::Index cols) {
    return MatrixMap(theta.data() + offset, rows, cols);
  }
  ConstMatrixMap block(Eigen::Index offset, Eigen::Index rows, Eigen::Index cols) const {
    return ConstMatrixMap(theta.data() + offset, rows, cols);
  }
  ConstVectorMap bias(Eigen::Index offset, Eigen::Index n) const { return ConstVectorMap(theta.data() + offset, n); }
};

struct ClassifierActivations {
  Matrix input, z1, h1, z2, h2, logits;
};

/// Subtracts each image's mean intensity, leaving lesion contrast and polarity.
inline Matrix CenterRows(const Matrix& x) { return x.colwise() - x.rowwise().mean(); }

inline ClassifierActivations ClassifierForward(const ClassifierModel& m, const Matrix& x) {
  const auto& c = m.config;
  if (x.cols() != c.input_dim) throw PreconditionError("classifier: input dimension mismatch");
  const ClassifierLayout l(c);
  ClassifierActivations a;
  a.input = CenterRows(x);
  a.z1 = a.input * m.block(l.w1, c.input_dim, c.hidden1);
  a.z1.rowwise() += m.bias(l.b1, c.hidden1).transpose();
  a.h1 = Silu(a.z1);
  a.z2 = a.h1 * m.block(l.w2, c.hidden1, c.hidden2);
  a.z2.rowwise() += m.bias(l.b2, c.hidden2).transpose();
  a.h2 = Silu(a.z2);
  a.logits = a.h2 * m.block(l.w3, c.hidden2, c.num_outputs);
  a.logits.rowwise() += m.bias(l.b3, c.num_outputs).transpose();
  return a;
}

/// Row-wise softmax with max subtraction.
inline Matrix Softmax(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index j = 0; j < logits.cols(); ++j) sum += (p(i, j) = std::exp(logits(i, j) - mx));
    p.row(i) /= sum;
  }
  return p;
}

/// Predictive distributions, one row per input row.
inline Matrix PredictProba(const ClassifierModel& m, const Matrix& x) { return Softmax(ClassifierForward(m, x).logits); }

/// Argmax of a distribution; ties go to the lowest index.
inline int ArgmaxLowest(std::span<const double> p) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(p.size()); ++j)
    if (p[static_cast<std::size_t>(j)] > p[static_cast<std::size_t>(best)]) best = j;
  return best;
}

inline std::vector<int> PredictLabels(const ClassifierModel& m, const Matrix& x) {
  const Matrix p = PredictProba(m, x);
  std::vector<int> out(static_cast<std::size_t>(p.rows()));
  std::vector<double> row(static_cast<std::size_t>(p.cols()));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) row[static_cast<std::size_t>(j)] = p(i, j);
    out[static_cast<std::size_t>(i)] = ArgmaxLowest(row);
  }
  return out;
}

/// Penultimate-layer features.
inline Matrix ClassifierFeatures(const ClassifierModel& m, const Matrix& x) { return ClassifierForward(m, x).h2; }

struct CrossEntropyValue {
  double loss = 0.0;
  Vector grad;
};

/// (1/B) sum_i w_i * CE(softmax(logits_i), label_i); w_i = 1 when `weights` is empty.
inline CrossEntropyValue WeightedCrossEntropy(const ClassifierModel& m, const Matrix& x, std::span<const int> labels,
                                              std::span<const double> weights = {}) {
  const auto& c = m.config;
  const Eigen::Index batch = x.rows();
  if (batch == 0) throw PreconditionError("cross entropy: empty batch");
  if (static_cast<Eigen::Index>(labels.size()) != batch) throw PreconditionError("cross entropy: label count mismatch");
  if (!weights.empty() && static_cast<Eigen::Index>(weights.size()) != batch)
    throw PreconditionError("cross entropy: weight count mismatch");
  const ClassifierActivations a = ClassifierForward(m, x);
  const Matrix p = Softmax(a.logits);
  const double inv_b = 1.0 / static_cast<double>(batch);

  CrossEntropyValue v;
  Matrix d_logits = p;
  for (Eigen::Index i = 0; i < batch; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= c.num_outputs) throw PreconditionError("cross entropy: label out of range");
    const double w = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i)];
    const double mx = a.logits.row(i).maxCoeff();
    const double lse = mx + std::log((a.logits.row(i).array() - mx).exp().sum());
    v.loss += w * (lse - a.logits(i, y));
    d_logits(i, y) -= 1.0;
    d_logits.row(i) *= w * inv_b;
  }
  v.loss *= inv_b;

  const ClassifierLayout l(c);
  v.grad = Vector::Zero(m.theta.size());
  MatrixMap(v.grad.data() + l.w3, c.hidden2, c.num_outputs).noalias() = a.h2.transpose() * d_logits;
  VectorMap(v.grad.data() + l.b3, c.num_outputs) = d_logits.colwise().sum().transpose();
  const Matrix d_z2 = (d_logits * m.block(l.w3, c.hidden2, c.num_outputs).transpose()).cwiseProduct(SiluGrad(a.z2));
  MatrixMap(v.grad.data() + l.w2, c.hidden1, c.hidden2).noalias() = a.h1.transpose() * d_z2;
  VectorMap(v.grad.data() + l.b2, c.hidden2) = d_z2.colwise().sum().transpose();
  const Matrix d_z1 = (d_z2 * m.block(l.w2, c.hidden1, c.hidden2).transpose()).cwiseProduct(SiluGrad(a.z1));
  MatrixMap(v.grad.data() + l.w1, c.input_dim, c.hidden1).noalias() = a.input.transpose() * d_z1;
  VectorMap(v.grad.data() + l.b1, c.hidden1) = d_z1.colwise().sum().transpose();
  return v;
}

inline constexpr std::uint32_t kClassifierCheckpointKind = 2;

inline void SaveClassifier(const std::filesystem::path& path, const ClassifierModel& m) {
  const auto& c = m.config;
  WriteCheckpoint(path, {kClassifierCheckpointKind, {c.input_dim, c.hidden1, c.hidden2, c.num_outputs}, m.theta, {}});
}

inline ClassifierModel LoadClassifier(const std::filesystem::path& path,
                                      const std::optional<ClassifierConfig>& expected = std::nullopt) {
  const CheckpointBlob blob = ReadCheckpoint(path, kClassifierCheckpointKind);
  if (blob.config.size() != 4) throw PreconditionError("classifier checkpoint: bad config header");
  ClassifierConfig c{static_cast<int>(blob.config[0]), static_cast<int>(blob.config[1]),
                     static_cast<int>(blob.config[2]), static_cast<int>(blob.config[3])};
  if (expected && !(*expected == c)) throw PreconditionError("classifier checkpoint: architecture mismatch");
  if (ClassifierLayout(c).total != blob.params.size())
    throw PreconditionError("classifier checkpoint: parameter count mismatch");
  ClassifierModel m(c);
  m.theta = blob.params;
  return m;
}

}  // namespace fairskin
