// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "fairskin/numerics/linalg.hpp"

namespace fairskin {

inline constexpr double kCovarianceRegularization = 1e-6;

/// d^2 = |mu1 - mu2|^2 + tr(S1 + S2 - 2 (S1^1/2 S2 S1^1/2)^1/2), with
/// S <- S + reg * I on both sides. Clamped at 0.
inline double FrechetDistance(const Vector& mu1, const Matrix& s1, const Vector& mu2, const Matrix& s2,
                              double reg = kCovarianceRegularization) {
  const Eigen::Index d = mu1.size();
  if (mu2.size() != d || s1.rows() != d || s1.cols() != d || s2.rows() != d || s2.cols() != d)
    throw PreconditionError("frechet distance: dimension mismatch");
  const Matrix eye = Matrix::Identity(d, d);
  const Matrix a = s1 + reg * eye;
  const Matrix b = s2 + reg * eye;
  const Matrix a_half = SqrtmPsd(a);
  Matrix inner = a_half * b * a_half;
  inner = 0.5 * (inner + inner.transpose()).eval();
  const double cross = SqrtmPsd(inner).trace();
  const double d2 = (mu1 - mu2).squaredNorm() + a.trace() + b.trace() - 2.0 * cross;
  return std::max(0.0, d2);
}

inline double FrechetDistance(const GaussianStats& p, const GaussianStats& q) {
  return FrechetDistance(p.mean, p.cov, q.mean, q.cov);
}

/// FID from feature rows.
inline double FidBetween(const Matrix& real, const Matrix& generated) {
  return FrechetDistance(ComputeGaussianStats(real), ComputeGaussianStats(generated));
}

struct GroupFid {
  int group = 0;
  /// Set only when both sides have at least dim + 1 vectors.
  std::optional<double> fid;
  int n_real = 0;
  int n_generated = 0;
  bool sufficient() const { return fid.has_value(); }
};

namespace detail {

inline Matrix RowsOfGroup(const Matrix& features, std::span<const int> groups, int g) {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < groups.size(); ++i)
    if (groups[i] == g) idx.push_back(static_cast<Eigen::Index>(i));
  Matrix out(static_cast<Eigen::Index>(idx.size()), features.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = features.row(idx[k]);
  return out;
}

}  // namespace detail

/// Frechet distance per group id in [0, num_groups). Groups with fewer than
/// dim + 1 vectors on either side are reported without a value.
inline std::vector<GroupFid> FidPerGroup(const Matrix& real, std::span<const int> real_groups, const Matrix& generated,
                                         std::span<const int> generated_groups, int num_groups) {
  if (real.cols() != generated.cols()) throw PreconditionError("fid per group: feature dimension mismatch");
  if (static_cast<Eigen::Index>(real_groups.size()) != real.rows() ||
      static_cast<Eigen::Index>(generated_groups.size()) != generated.rows())
    throw PreconditionError("fid per group: group tag count mismatch");
  const Eigen::Index need = real.cols() + 1;
  std::vector<GroupFid> out;
  for (int g = 0; g < num_groups; ++g) {
    GroupFid r;
    r.group = g;
    const Matrix a = detail::RowsOfGroup(real, real_groups, g);
    const Matrix b = detail::RowsOfGroup(generated, generated_groups, g);
    r.n_real = static_cast<int>(a.rows());
    r.n_generated = static_cast<int>(b.rows());
    if (a.rows() >= need && b.rows() >= need) r.fid = FidBetween(a, b);
    out.push_back(r);
  }
  return out;
}

/// Unbiased sample variance (n - 1 denominator).
inline double FidVariance(std::span<const double> values) {
  if (values.size() < 2) throw PreconditionError("fid variance: need at least 2 values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(values.size() - 1);
}

inline double FidVariance(const std::vector<GroupFid>& groups) {
  std::vector<double> v;
  for (const auto& g : groups)
    if (g.fid) v.push_back(*g.fid);
  return FidVariance(v);
}

}  // namespace fairskin
