// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "fairskin/data/patterns.hpp"
#include "fairskin/data/sample.hpp"
#include "fairskin/numerics/linalg.hpp"

namespace fairskin {

/// Recovers (race, disease) from a synthetic image using only the background
/// intensity and correlation against a bank of rendered pattern templates.
///
/// Disease is the family of the template with the largest absolute normalized
/// correlation; the background is the intercept of a least-squares fit of the
/// image on that template, and race is the tone band containing it.
class OracleDecoder {
 public:
  OracleDecoder(int height, int width, int grid_per_range = 4, double center_step = 0.5)
      : height_(height), width_(width) {
    const double s = PatternScale(height, width);
    std::vector<Image> raw;
    for (Disease d : kAllDiseases) {
      const PatternRange range = RangeFor(d);
      const int n_len = range.length_hi > range.length_lo ? 3 : 1;
      for (int i = 0; i < grid_per_range; ++i) {
        for (int j = 0; j < n_len; ++j) {
          PatternGeometry g;
          g.size = s * Lerp(range.size_lo, range.size_hi, i, grid_per_range);
          g.length = s * Lerp(range.length_lo, range.length_hi, j, n_len);
          const double extent = PatternExtent(d, g, s);
          for (double cy : Centers(height, extent, center_step)) {
            for (double cx : Centers(width, extent, center_step)) {
              g.cx = cx;
              g.cy = cy;
              raw.push_back(RenderPattern(d, g, height, width));
              family_.push_back(d);
            }
          }
        }
      }
    }
    const auto dim = static_cast<Eigen::Index>(height) * width;
    raw_ = Matrix(static_cast<Eigen::Index>(raw.size()), dim);
    for (std::size_t k = 0; k < raw.size(); ++k)
      for (Eigen::Index p = 0; p < dim; ++p) raw_(static_cast<Eigen::Index>(k), p) = raw[k].pixels[static_cast<std::size_t>(p)];
    normalized_ = raw_.colwise() - raw_.rowwise().mean();
    for (Eigen::Index k = 0; k < normalized_.rows(); ++k) normalized_.row(k).normalize();
  }

  struct Decoded {
    Race race;
    Disease disease;
    double background;
    double correlation;
  };

  Decoded Decode(const Image& img) const {
    if (img.height != height_ || img.width != width_) throw PreconditionError("decoder: image size mismatch");
    const Eigen::Map<const Vector> x(img.pixels.data(), static_cast<Eigen::Index>(img.size()));
    const Vector centered = x.array() - x.mean();
    const Vector scores = normalized_ * centered;
    Eigen::Index best = 0;
    scores.cwiseAbs().maxCoeff(&best);

    // Least squares x ~ b + a * t.
    const Vector t = raw_.row(best).transpose();
    const double n = static_cast<double>(t.size());
    const double st = t.sum(), stt = t.squaredNorm(), sx = x.sum(), stx = t.dot(x);
    const double det = n * stt - st * st;
    const double b = det != 0.0 ? (stt * sx - st * stx) / det : x.mean();

    const double norm = centered.norm();
    return {RaceFromTone(b), family_[static_cast<std::size_t>(best)], b,
            norm > 0 ? scores(best) / norm : 0.0};
  }

  int DecodeLabel(const Image& img) const {
    const Decoded d = Decode(img);
    return ClassIndex(d.race, d.disease);
  }

  std::size_t bank_size() const { return family_.size(); }

 private:
  static double Lerp(double lo, double hi, int i, int n) {
    return n == 1 ? (lo + hi) / 2.0 : lo + (hi - lo) * i / (n - 1);
  }
  static std::vector<double> Centers(int n, double extent, double step) {
    std::vector<double> out;
    const double lo = extent, hi = (n - 1) - extent;
    if (hi <= lo) return {(n - 1) / 2.0};
    for (double c = std::ceil(lo / step) * step; c <= hi + 1e-9; c += step) out.push_back(c);
    if (out.empty()) out.push_back((lo + hi) / 2.0);
    return out;
  }

  int height_;
  int width_;
  Matrix raw_;
  Matrix normalized_;
  std::vector<Disease> family_;
};

}  // namespace fairskin
