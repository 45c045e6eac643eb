// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

#if defined(__AVX512F__) || (defined(__AVX2__) && defined(__FMA__))
#include <immintrin.h>
#endif

#include "fairskin/numerics/linalg.hpp"

namespace fairskin {

namespace detail {

#if defined(__AVX512F__)
struct Simd {
  using V = __m512d;
  static constexpr int kLanes = 8;
  static V Zero() { return _mm512_setzero_pd(); }
  static V Load(const double* p) { return _mm512_loadu_pd(p); }
  static V Splat(double v) { return _mm512_set1_pd(v); }
  static V Fma(V a, V b, V c) { return _mm512_fmadd_pd(a, b, c); }
  static void Store(double* p, V v) { _mm512_storeu_pd(p, v); }
};
#define FAIRSKIN_HAVE_SIMD 1
#elif defined(__AVX2__) && defined(__FMA__)
struct Simd {
  using V = __m256d;
  static constexpr int kLanes = 4;
  static V Zero() { return _mm256_setzero_pd(); }
  static V Load(const double* p) { return _mm256_loadu_pd(p); }
  static V Splat(double v) { return _mm256_set1_pd(v); }
  static V Fma(V a, V b, V c) { return _mm256_fmadd_pd(a, b, c); }
  static void Store(double* p, V v) { _mm256_storeu_pd(p, v); }
};
#define FAIRSKIN_HAVE_SIMD 1
#endif

#ifdef FAIRSKIN_HAVE_SIMD
template <int Rows>
inline void SimdBlock(const double* x, long ldx, long depth, const double* w, long ldw, double* y, long ldy) {
  using S = Simd;
  typename S::V acc[Rows][4];
  for (int r = 0; r < Rows; ++r)
    for (int c = 0; c < 4; ++c) acc[r][c] = S::Zero();
  for (long k = 0; k < depth; ++k) {
    const double* wk = w + k * ldw;
    const typename S::V w0 = S::Load(wk), w1 = S::Load(wk + S::kLanes), w2 = S::Load(wk + 2 * S::kLanes),
                        w3 = S::Load(wk + 3 * S::kLanes);
    for (int r = 0; r < Rows; ++r) {
      const typename S::V xv = S::Splat(x[r * ldx + k]);
      acc[r][0] = S::Fma(xv, w0, acc[r][0]);
      acc[r][1] = S::Fma(xv, w1, acc[r][1]);
      acc[r][2] = S::Fma(xv, w2, acc[r][2]);
      acc[r][3] = S::Fma(xv, w3, acc[r][3]);
    }
  }
  for (int r = 0; r < Rows; ++r)
    for (int c = 0; c < 4; ++c) S::Store(y + r * ldy + c * S::kLanes, acc[r][c]);
}
#endif

}  // namespace detail

/// Y = X * W for row-major operands, where every output element is the
/// sequential fused-multiply-add chain over the inner index. The value of a
/// row therefore does not depend on which other rows share the call, unlike a
/// blocked GEMM. Used for network forward passes.
inline void RowStableMatMul(const double* x, long rows, long depth, const double* w, long cols, double* y) {
  long j = 0;
#ifdef FAIRSKIN_HAVE_SIMD
  constexpr long kBlock = 4 * detail::Simd::kLanes;
  for (; j + kBlock <= cols; j += kBlock) {
    long i = 0;
    for (; i + 4 <= rows; i += 4) detail::SimdBlock<4>(x + i * depth, depth, depth, w + j, cols, y + i * cols + j, cols);
    for (; i < rows; ++i) detail::SimdBlock<1>(x + i * depth, depth, depth, w + j, cols, y + i * cols + j, cols);
  }
#endif
  for (; j < cols; ++j) {
    for (long i = 0; i < rows; ++i) {
      double acc = 0.0;
      for (long k = 0; k < depth; ++k) acc = std::fma(x[i * depth + k], w[k * cols + j], acc);
      y[i * cols + j] = acc;
    }
  }
}

template <typename WeightMatrix>
inline Matrix RowStableMatMul(const Matrix& x, const WeightMatrix& w) {
  static_assert(static_cast<int>(WeightMatrix::IsRowMajor) == 1, "weights must be row-major");
  if (x.cols() != w.rows()) throw PreconditionError("matmul: inner dimension mismatch");
  Matrix y(x.rows(), w.cols());
  RowStableMatMul(x.data(), x.rows(), x.cols(), w.data(), w.cols(), y.data());
  return y;
}

}  // namespace fairskin
