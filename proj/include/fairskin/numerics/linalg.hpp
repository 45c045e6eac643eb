// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fairskin/numerics/errors.hpp"

namespace fairskin {

/// Dense row-major 64-bit matrix. Eigen provides storage and products; the
/// spectral routines below are implemented here.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct SymmetricEigen {
  Vector values;   // descending
  Matrix vectors;  // column i pairs with values(i)
};

inline bool AllFinite(const Matrix& m) { return m.allFinite(); }

/// Largest |m_ij - m_ji|.
inline double AsymmetryOf(const Matrix& m) {
  return m.rows() == 0 ? 0.0 : (m - m.transpose()).cwiseAbs().maxCoeff();
}

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// Sweeps over all (p, q) pairs until the off-diagonal Frobenius norm falls
/// below `tol` times the Frobenius norm of the input.
inline SymmetricEigen EigSym(const Matrix& m, double symmetry_tol = 1e-10, double tol = 1e-12,
                             int max_sweeps = 100) {
  if (m.rows() != m.cols()) throw PreconditionError("eig_sym: matrix is not square");
  if (!m.allFinite()) throw PreconditionError("eig_sym: matrix has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (AsymmetryOf(m) > symmetry_tol * scale) {
    throw PreconditionError("eig_sym: matrix is not symmetric (max asymmetry " +
                            std::to_string(AsymmetryOf(m)) + ")");
  }
  const Eigen::Index n = m.rows();
  Matrix a = 0.5 * (m + m.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double frob = a.norm();

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  for (;; ++sweep) {
    if (off_norm() <= tol * frob) break;
    if (sweep == max_sweeps) {
      throw NumericError("eig_sym: no convergence after " + std::to_string(sweep) +
                         " sweeps (off-diagonal norm " + std::to_string(off_norm()) + ")");
    }
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });
  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

/// Principal square root of a symmetric positive semi-definite matrix.
/// Eigenvalues in [-clamp_tol, 0) are treated as rounding noise and zeroed.
inline Matrix SqrtmPsd(const Matrix& m, double clamp_tol = 1e-10) {
  const SymmetricEigen eig = EigSym(m);
  const Eigen::Index n = m.rows();
  if (n == 0) return m;
  const double floor = -clamp_tol * std::max(1.0, std::abs(eig.values(0)));
  Vector roots(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lambda = eig.values(i);
    if (lambda < floor) {
      throw NumericError("sqrtm_psd: matrix is not PSD (eigenvalue " + std::to_string(lambda) + ")");
    }
    roots(i) = std::sqrt(std::max(lambda, 0.0));
  }
  Matrix r = eig.vectors * roots.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (r + r.transpose());
}

struct GaussianStats {
  Vector mean;
  Matrix cov;  // unbiased, divides by n - 1
};

/// Mean and unbiased covariance of the rows of `features`.
inline GaussianStats ComputeGaussianStats(const Matrix& features) {
  const Eigen::Index n = features.rows();
  if (n < 2) {
    throw InsufficientDataError("gaussian_stats: need at least 2 vectors, got " + std::to_string(n));
  }
  GaussianStats s;
  s.mean = features.colwise().mean().transpose();
  const Matrix centered = features.rowwise() - s.mean.transpose();
  s.cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  s.cov = 0.5 * (s.cov + s.cov.transpose());
  return s;
}

inline GaussianStats ComputeGaussianStats(const std::vector<std::vector<double>>& features) {
  if (features.size() < 2) {
    throw InsufficientDataError("gaussian_stats: need at least 2 vectors, got " +
                                std::to_string(features.size()));
  }
  const std::size_t dim = features.front().size();
  Matrix m(static_cast<Eigen::Index>(features.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != dim) throw PreconditionError("gaussian_stats: ragged feature vectors");
    for (std::size_t j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = features[i][j];
  }
  return ComputeGaussianStats(m);
}

}  // namespace fairskin
