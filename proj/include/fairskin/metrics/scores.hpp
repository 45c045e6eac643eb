// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "fairskin/data/labels.hpp"
#include "fairskin/numerics/linalg.hpp"

namespace fairskin {

struct InceptionScore {
  double mean = 0.0;
  double std = 0.0;
};

/// Per split: exp(mean_x KL(p(y|x) || p_bar)), p_bar the split mean. Rows are
/// cut into `splits` contiguous blocks; std is the population std over splits.
inline InceptionScore InceptionStyleScore(const Matrix& probs, int splits = 10) {
  const Eigen::Index n = probs.rows();
  if (splits < 1) throw PreconditionError("inception score: splits must be positive");
  if (n < splits) throw PreconditionError("inception score: fewer images than splits");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(probs.row(i).minCoeff() >= 0.0) || std::abs(probs.row(i).sum() - 1.0) > 1e-6)
      throw PreconditionError("inception score: row is not a distribution");
  }
  std::vector<double> scores;
  for (int s = 0; s < splits; ++s) {
    const Eigen::Index lo = n * s / splits, hi = n * (s + 1) / splits;
    const Eigen::RowVectorXd p_bar = probs.middleRows(lo, hi - lo).colwise().mean();
    double kl_sum = 0.0;
    for (Eigen::Index i = lo; i < hi; ++i)
      for (Eigen::Index j = 0; j < probs.cols(); ++j) {
        const double p = probs(i, j);
        if (p > 0.0) kl_sum += p * (std::log(p) - std::log(p_bar(j)));
      }
    scores.push_back(std::exp(kl_sum / static_cast<double>(hi - lo)));
  }
  InceptionScore out;
  for (double v : scores) out.mean += v;
  out.mean /= splits;
  for (double v : scores) out.std += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(out.std / splits);
  return out;
}

/// (100 / |D|) sum_d sum_z |p(Yhat = d) - p(Yhat = d | Z = z)|, in percentage points.
inline double DemographicParity(std::span<const int> predictions, std::span<const int> groups, int num_labels,
                                int num_groups) {
  if (predictions.size() != groups.size()) throw PreconditionError("demographic parity: size mismatch");
  if (predictions.empty()) throw MissingGroupError("demographic parity: no predictions");
  std::vector<std::vector<int>> count(static_cast<std::size_t>(num_groups), std::vector<int>(static_cast<std::size_t>(num_labels), 0));
  std::vector<int> group_size(static_cast<std::size_t>(num_groups), 0);
  std::vector<int> pooled(static_cast<std::size_t>(num_labels), 0);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int d = predictions[i], z = groups[i];
    if (d < 0 || d >= num_labels || z < 0 || z >= num_groups) throw PreconditionError("demographic parity: index out of range");
    ++count[static_cast<std::size_t>(z)][static_cast<std::size_t>(d)];
    ++group_size[static_cast<std::size_t>(z)];
    ++pooled[static_cast<std::size_t>(d)];
  }
  for (int z = 0; z < num_groups; ++z)
    if (group_size[static_cast<std::size_t>(z)] == 0)
      throw MissingGroupError("demographic parity: group " + std::to_string(z) + " is empty");
  const double n = static_cast<double>(predictions.size());
  double gap = 0.0;
  for (int d = 0; d < num_labels; ++d)
    for (int z = 0; z < num_groups; ++z)
      gap += std::abs(pooled[static_cast<std::size_t>(d)] / n -
                      static_cast<double>(count[static_cast<std::size_t>(z)][static_cast<std::size_t>(d)]) /
                          group_size[static_cast<std::size_t>(z)]);
  return 100.0 * gap / num_labels;
}

/// Disease-prediction parity across the three races.
inline double DemographicParity(std::span<const int> disease_predictions, std::span<const int> races) {
  return DemographicParity(disease_predictions, races, kNumDiseases, kNumRaces);
}

/// acc / (1 + dp), both in percentage points.
inline double Essp(double acc_pp, double dp_pp) {
  if (!(acc_pp >= 0.0 && acc_pp <= 100.0)) throw PreconditionError("essp: accuracy must be in [0, 100]");
  if (!(dp_pp >= 0.0)) throw PreconditionError("essp: dp must be non-negative");
  return acc_pp / (1.0 + dp_pp);
}

/// Rows projected on the two leading principal axes of their covariance.
inline Matrix Pca2d(const Matrix& features) {
  if (features.rows() < 2) throw InsufficientDataError("pca: need at least 2 rows");
  const GaussianStats s = ComputeGaussianStats(features);
  const SymmetricEigen e = EigSym(s.cov);
  const Eigen::Index k = std::min<Eigen::Index>(2, e.vectors.cols());
  Matrix centered = features.rowwise() - s.mean.transpose();
  Matrix out = Matrix::Zero(features.rows(), 2);
  out.leftCols(k) = centered * e.vectors.leftCols(k);
  return out;
}

}  // namespace fairskin
