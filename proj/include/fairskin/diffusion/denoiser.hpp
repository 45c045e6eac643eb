// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "fairskin/data/labels.hpp"
#include "fairskin/numerics/nn.hpp"
#include "fairskin/numerics/row_gemm.hpp"

namespace fairskin {

struct DenoiserConfig {
  int image_dim = 256;
  int time_dim = 32;
  int class_dim = 32;
  int hidden = 256;
  int num_classes = kNumClasses;

  int input_dim() const { return image_dim + time_dim + class_dim; }
  friend bool operator==(const DenoiserConfig&, const DenoiserConfig&) = default;
};

/// Offsets of each parameter block inside the flat vector theta.
struct DenoiserLayout {
  explicit DenoiserLayout(const DenoiserConfig& c) {
    Eigen::Index off = 0;
    auto take = [&](Eigen::Index n) {
      const Eigen::Index o = off;
      off += n;
      return o;
    };
    class_table = take(static_cast<Eigen::Index>(c.num_classes) * c.class_dim);
    w1 = take(static_cast<Eigen::Index>(c.input_dim()) * c.hidden);
    b1 = take(c.hidden);
    w2 = take(static_cast<Eigen::Index>(c.hidden) * c.hidden);
    b2 = take(c.hidden);
    w3 = take(static_cast<Eigen::Index>(c.hidden) * c.image_dim);
    b3 = take(c.image_dim);
    total = off;
  }
  Eigen::Index class_table, w1, b1, w2, b2, w3, b3, total;
};

/// Noise predictor that is optimal when x0 ~ N(mean, V diag(variances) V^T):
///   g_t(x) = sqrt(1 - abar_t) * Sigma_t^{-1} (x - sqrt(abar_t) mean),
///   Sigma_t = abar_t * Cov + (1 - abar_t) I,
/// together with the per-t RMS of its residual. The denoiser predicts
///   eps = g_t(x_t) + residual_scale_t * mlp(x_t, t, y),
/// so the network only models what the Gaussian fit misses.
struct GaussianPreconditioner {
  std::vector<double> alpha_bar;  // index 0..T
  Vector mean;
  Matrix basis;    // columns are orthonormal directions
  Matrix basis_t;  // transpose, kept row-major for the row-stable product
  Vector variances;

  bool empty() const { return alpha_bar.empty(); }
  int steps() const { return static_cast<int>(alpha_bar.size()) - 1; }

  static GaussianPreconditioner Isotropic(std::vector<double> alpha_bar, int dim, double sigma) {
    return FromEigen(std::move(alpha_bar), Vector::Zero(dim), Matrix::Identity(dim, dim),
                     Vector::Constant(dim, sigma * sigma));
  }

  /// Mean and covariance eigenbasis of the rows of `data`; variances are floored at `floor`.
  static GaussianPreconditioner Fit(std::vector<double> alpha_bar, const Matrix& data, double floor = 1e-6) {
    const GaussianStats stats = ComputeGaussianStats(data);
    const SymmetricEigen e = EigSym(stats.cov);
    return FromEigen(std::move(alpha_bar), stats.mean, e.vectors, e.values.cwiseMax(floor));
  }

  static GaussianPreconditioner FromEigen(std::vector<double> alpha_bar, Vector mean, Matrix basis, Vector variances) {
    const Eigen::Index d = mean.size();
    if (basis.rows() != d || basis.cols() != d || variances.size() != d)
      throw PreconditionError("preconditioner: dimension mismatch");
    if (!(variances.minCoeff() > 0.0)) throw PreconditionError("preconditioner: variances must be positive");
    GaussianPreconditioner p;
    p.alpha_bar = std::move(alpha_bar);
    p.mean = std::move(mean);
    p.basis = std::move(basis);
    p.basis_t = p.basis.transpose();
    p.variances = std::move(variances);
    return p;
  }

  /// RMS of eps - g_t(x_t) under the Gaussian model.
  double residual_scale(int t) const {
    const double ab = alpha_bar.at(static_cast<std::size_t>(t));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < variances.size(); ++i) acc += ab * variances(i) / (ab * variances(i) + 1.0 - ab);
    return std::sqrt(acc / static_cast<double>(variances.size()));
  }

  /// g_t for each row of x, row b at timestep t[b]. Rows are independent of
  /// one another, bit for bit.
  Matrix Predict(const Matrix& x, std::span<const int> t) const {
    const Eigen::Index rows = x.rows(), d = mean.size();
    Matrix centered(rows, d);
    for (Eigen::Index b = 0; b < rows; ++b) {
      const double ab = alpha_bar.at(static_cast<std::size_t>(t[static_cast<std::size_t>(b)]));
      centered.row(b) = x.row(b) - std::sqrt(ab) * mean.transpose();
    }
    Matrix coords(rows, d);
    RowStableMatMul(centered.data(), rows, d, basis.data(), d, coords.data());
    for (Eigen::Index b = 0; b < rows; ++b) {
      const double ab = alpha_bar.at(static_cast<std::size_t>(t[static_cast<std::size_t>(b)]));
      for (Eigen::Index i = 0; i < d; ++i) coords(b, i) *= std::sqrt(1.0 - ab) / (ab * variances(i) + 1.0 - ab);
    }
    Matrix g(rows, d);
    RowStableMatMul(coords.data(), rows, d, basis_t.data(), d, g.data());
    return g;
  }
};

/// Noise predictor eps_theta(x_t, y, t): an MLP over
/// [x_t, sinusoidal(t), class_embedding(y)] with hidden widths (H, H) and SiLU.
struct DenoiserModel {
  DenoiserConfig config;
  Vector theta;
  /// Fixed Gaussian part of the prediction; empty means eps = mlp.
  GaussianPreconditioner precond;

  DenoiserModel() = default;
  explicit DenoiserModel(const DenoiserConfig& cfg)
      : config(cfg), theta(Vector::Zero(DenoiserLayout(cfg).total)) {}

  static DenoiserModel Initialize(const DenoiserConfig& cfg, Rng rng) {
    DenoiserModel m(cfg);
    const DenoiserLayout l(cfg);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(cfg.num_classes) * cfg.class_dim; ++i)
      m.theta(l.class_table + i) = rng.Normal();
    InitLecun(m.block(l.w1, cfg.input_dim(), cfg.hidden), rng);
    InitLecun(m.block(l.w2, cfg.hidden, cfg.hidden), rng);
    InitLecun(m.block(l.w3, cfg.hidden, cfg.image_dim), rng);
    return m;
  }

  Eigen::Index parameter_count() const { return theta.size(); }

  MatrixMap block(Eigen::Index offset, Eigen::Index rows, Eigen::Index cols) {
    return MatrixMap(theta.data() + offset, rows, cols);
  }
  ConstMatrixMap block(Eigen::Index offset, Eigen::Index rows, Eigen::Index cols) const {
    return ConstMatrixMap(theta.data() + offset, rows, cols);
  }
};

/// Sinusoidal embedding: sin(t f_k) then cos(t f_k), f_k = 10000^{-k / (dim/2)}.
inline Vector TimestepEmbedding(int t, int dim) {
  Vector e(dim);
  const int half = dim / 2;
  for (int k = 0; k < half; ++k) {
    const double f = std::exp(-std::log(10000.0) * k / half);
    e(k) = std::sin(t * f);
    e(half + k) = std::cos(t * f);
  }
  if (dim % 2 == 1) e(dim - 1) = 0.0;
  return e;
}

/// One network evaluation: input row `input` of the batch under label `label`.
struct DenoiserQuery {
  int input;
  int label;
};

struct DenoiserActivations {
  std::vector<DenoiserQuery> queries;
  Matrix inputs;  // B x (D + time_dim): [x_t, temb]
  Matrix z1, h1, z2, h2, out;
  std::vector<double> out_scale;  // per query; empty when unscaled
};

/// Forward pass for an arbitrary set of (input, label) queries. The first
/// layer is split as inputs * W1[x,t] + class_table[y] * W1[c], so repeated
/// labels on a shared input reuse the input projection.
inline DenoiserActivations DenoiserForward(const DenoiserModel& m, const Matrix& x_t, std::span<const int> t,
                                           std::vector<DenoiserQuery> queries) {
  const DenoiserConfig& c = m.config;
  const DenoiserLayout l(c);
  if (x_t.cols() != c.image_dim) throw PreconditionError("denoiser: image dimension mismatch");
  if (static_cast<Eigen::Index>(t.size()) != x_t.rows()) throw PreconditionError("denoiser: timestep count mismatch");
  const Eigen::Index batch = x_t.rows();
  const Eigen::Index xt_dim = c.image_dim + c.time_dim;

  DenoiserActivations a;
  a.inputs.resize(batch, xt_dim);
  a.inputs.leftCols(c.image_dim) = x_t;
  for (Eigen::Index b = 0; b < batch; ++b)
    a.inputs.row(b).tail(c.time_dim) = TimestepEmbedding(t[static_cast<std::size_t>(b)], c.time_dim).transpose();

  const double* w1 = m.theta.data() + l.w1;
  const Matrix proj_in = [&] {
    Matrix y(batch, c.hidden);
    RowStableMatMul(a.inputs.data(), batch, xt_dim, w1, c.hidden, y.data());
    return y;
  }();
  const Matrix proj_class = [&] {
    Matrix y(c.num_classes, c.hidden);
    RowStableMatMul(m.theta.data() + l.class_table, c.num_classes, c.class_dim, w1 + xt_dim * c.hidden, c.hidden,
                    y.data());
    return y;
  }();
  const ConstVectorMap b1(m.theta.data() + l.b1, c.hidden);

  const auto n = static_cast<Eigen::Index>(queries.size());
  a.z1.resize(n, c.hidden);
  for (Eigen::Index q = 0; q < n; ++q) {
    const auto& query = queries[static_cast<std::size_t>(q)];
    if (query.input < 0 || query.input >= batch || query.label < 0 || query.label >= c.num_classes)
      throw PreconditionError("denoiser: query out of range");
    a.z1.row(q) = proj_in.row(query.input) + proj_class.row(query.label) + b1.transpose();
  }
  a.h1 = Silu(a.z1);

  a.z2.resize(n, c.hidden);
  RowStableMatMul(a.h1.data(), n, c.hidden, m.theta.data() + l.w2, c.hidden, a.z2.data());
  a.z2.rowwise() += ConstVectorMap(m.theta.data() + l.b2, c.hidden).transpose();
  a.h2 = Silu(a.z2);

  a.out.resize(n, c.image_dim);
  RowStableMatMul(a.h2.data(), n, c.hidden, m.theta.data() + l.w3, c.image_dim, a.out.data());
  a.out.rowwise() += ConstVectorMap(m.theta.data() + l.b3, c.image_dim).transpose();
  if (!m.precond.empty()) {
    const auto& p = m.precond;
    if (p.mean.size() != c.image_dim) throw PreconditionError("denoiser: preconditioner dimension mismatch");
    for (int tb : t)
      if (tb < 0 || tb > p.steps()) throw PreconditionError("denoiser: timestep outside preconditioner range");
    const Matrix g = p.Predict(x_t, t);
    a.out_scale.resize(static_cast<std::size_t>(n));
    for (Eigen::Index q = 0; q < n; ++q) {
      const int input = queries[static_cast<std::size_t>(q)].input;
      const double scale = p.residual_scale(t[static_cast<std::size_t>(input)]);
      a.out_scale[static_cast<std::size_t>(q)] = scale;
      for (Eigen::Index j = 0; j < c.image_dim; ++j) a.out(q, j) = scale * a.out(q, j) + g(input, j);
    }
  }
  a.queries = std::move(queries);
  return a;
}

/// Accumulates d(loss)/d(theta) into `grad` given d(loss)/d(out).
inline void DenoiserBackward(const DenoiserModel& m, const DenoiserActivations& a, const Matrix& d_eps,
                             Vector& grad) {
  Matrix scaled;
  if (!a.out_scale.empty()) {
    scaled = d_eps;
    for (Eigen::Index q = 0; q < scaled.rows(); ++q) scaled.row(q) *= a.out_scale[static_cast<std::size_t>(q)];
  }
  const Matrix& d_out = a.out_scale.empty() ? d_eps : scaled;
  const DenoiserConfig& c = m.config;
  const DenoiserLayout l(c);
  if (grad.size() != m.theta.size()) grad = Vector::Zero(m.theta.size());
  const Eigen::Index xt_dim = c.image_dim + c.time_dim;
  const ConstMatrixMap w2(m.theta.data() + l.w2, c.hidden, c.hidden);
  const ConstMatrixMap w3(m.theta.data() + l.w3, c.hidden, c.image_dim);
  const ConstMatrixMap w1c(m.theta.data() + l.w1 + xt_dim * c.hidden, c.class_dim, c.hidden);
  const ConstMatrixMap table(m.theta.data() + l.class_table, c.num_classes, c.class_dim);

  MatrixMap(grad.data() + l.w3, c.hidden, c.image_dim).noalias() += a.h2.transpose() * d_out;
  VectorMap(grad.data() + l.b3, c.image_dim) += d_out.colwise().sum().transpose();
  const Matrix dz2 = (d_out * w3.transpose()).cwiseProduct(SiluGrad(a.z2));
  MatrixMap(grad.data() + l.w2, c.hidden, c.hidden).noalias() += a.h1.transpose() * dz2;
  VectorMap(grad.data() + l.b2, c.hidden) += dz2.colwise().sum().transpose();
  const Matrix dz1 = (dz2 * w2.transpose()).cwiseProduct(SiluGrad(a.z1));
  VectorMap(grad.data() + l.b1, c.hidden) += dz1.colwise().sum().transpose();

  Matrix d_in = Matrix::Zero(a.inputs.rows(), c.hidden);
  Matrix d_class = Matrix::Zero(c.num_classes, c.hidden);
  for (std::size_t q = 0; q < a.queries.size(); ++q) {
    d_in.row(a.queries[q].input) += dz1.row(static_cast<Eigen::Index>(q));
    d_class.row(a.queries[q].label) += dz1.row(static_cast<Eigen::Index>(q));
  }
  MatrixMap(grad.data() + l.w1, xt_dim, c.hidden).noalias() += a.inputs.transpose() * d_in;
  MatrixMap(grad.data() + l.w1 + xt_dim * c.hidden, c.class_dim, c.hidden).noalias() += table.transpose() * d_class;
  MatrixMap(grad.data() + l.class_table, c.num_classes, c.class_dim).noalias() += d_class * w1c.transpose();
}

/// eps_theta(x_t, y, t) for a batch, one label per row.
inline Matrix PredictNoise(const DenoiserModel& m, const Matrix& x_t, std::span<const int> t,
                           std::span<const int> labels) {
  std::vector<DenoiserQuery> q(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) q[i] = {static_cast<int>(i), labels[i]};
  return DenoiserForward(m, x_t, t, std::move(q)).out;
}

}  // namespace fairskin
