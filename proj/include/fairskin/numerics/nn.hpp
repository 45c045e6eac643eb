// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

#include "fairskin/numerics/linalg.hpp"
#include "fairskin/numerics/rng.hpp"

namespace fairskin {

using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;
using VectorMap = Eigen::Map<Vector>;
using ConstVectorMap = Eigen::Map<const Vector>;

inline double Sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// SiLU z * sigmoid(z), applied elementwise.
inline Matrix Silu(const Matrix& z) {
  return z.unaryExpr([](double v) { return v * Sigmoid(v); });
}

/// d silu / dz = s (1 + z (1 - s)).
inline Matrix SiluGrad(const Matrix& z) {
  return z.unaryExpr([](double v) {
    const double s = Sigmoid(v);
    return s * (1.0 + v * (1.0 - s));
  });
}

/// Fills `w` with N(0, 1 / fan_in).
inline void InitLecun(Eigen::Ref<Matrix> w, Rng& rng) {
  const double sd = 1.0 / std::sqrt(static_cast<double>(w.rows()));
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = sd * rng.Normal();
}

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias correction over a flat parameter vector.
class Adam {
 public:
  Adam(Eigen::Index size, AdamConfig cfg) : cfg_(cfg), m_(Vector::Zero(size)), v_(Vector::Zero(size)) {}

  void Step(Vector& params, const Vector& grad) {
    ++t_;
    m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grad;
    v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    params.array() -= cfg_.learning_rate * (m_.array() / c1) / ((v_.array() / c2).sqrt() + cfg_.epsilon);
  }

  long steps() const { return t_; }

 private:
  AdamConfig cfg_;
  Vector m_, v_;
  long t_ = 0;
};

}  // namespace fairskin
