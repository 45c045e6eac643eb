// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

#include "fairskin/numerics/linalg.hpp"
#include "fairskin/numerics/rng.hpp"

namespace fairskin {

/// Frozen linear map R^D -> R^k with N(0, 1/D) entries drawn from a fixed
/// stream, independent of any trained model.
class RandomProjection {
 public:
  RandomProjection(int input_dim, int output_dim = 64, std::uint64_t seed = 0x46534b4eULL)
      : w_(input_dim, output_dim) {
    Rng rng = Rng(seed).Split("random-projection");
    const double sd = 1.0 / std::sqrt(static_cast<double>(input_dim));
    for (Eigen::Index i = 0; i < w_.rows(); ++i)
      for (Eigen::Index j = 0; j < w_.cols(); ++j) w_(i, j) = sd * rng.Normal();
  }

  Matrix operator()(const Matrix& x) const {
    if (x.cols() != w_.rows()) throw PreconditionError("random projection: input dimension mismatch");
    return x * w_;
  }

 private:
  Matrix w_;
};

}  // namespace fairskin
