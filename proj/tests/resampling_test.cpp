// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fairskin/resampling/sampler.hpp"
#include "fairskin/resampling/weights.hpp"

namespace fairskin {
namespace {

// A label-only corpus: images are irrelevant to resampling.
std::vector<Sample> CorpusOf(const ClassCountTable& t) {
  std::vector<Sample> out;
  for (int y = 0; y < kNumClasses; ++y)
    for (int i = 0; i < t.at(y); ++i) out.push_back(Sample{Image(1, 1), RaceOfClass(y), DiseaseOfClass(y), Origin::kReal});
  return out;
}

ClassCountTable TwoClasses(int a, int b) {
  ClassCountTable t;
  t.set(0, a);
  t.set(1, b);
  return t;
}

std::array<double, kNumClasses> ClassMass(const ClassCountTable& t, const ClassWeights& w) {
  std::array<double, kNumClasses> m{};
  double total = 0;
  for (int y = 0; y < kNumClasses; ++y)
    if (t.at(y) > 0) total += t.at(y) * w.at(y);
  for (int y = 0; y < kNumClasses; ++y) m[y] = t.at(y) > 0 ? t.at(y) * w.at(y) / total : 0.0;
  return m;
}

TEST(CbrsWeights, TwoClassExample) {
  const ClassWeights w = CbrsWeights(TwoClasses(10, 40));
  EXPECT_NEAR(w.at(0), 2.5, 1e-12);
  EXPECT_NEAR(w.at(1), 0.625, 1e-12);
  EXPECT_FALSE(w.has(2));
  EXPECT_THROW(w.at(2), MissingWeightError);
}

TEST(CbrsWeights, EqualCountsGiveUnitWeights) {
  ClassCountTable t;
  for (int y = 0; y < kNumClasses; ++y) t.set(y, 17);
  for (auto scheme : {WeightScheme::kCbrs, WeightScheme::kSqrs, WeightScheme::kUniform}) {
    const ClassWeights w = ClassWeights::FromCounts(t, scheme);
    for (int y = 0; y < kNumClasses; ++y) EXPECT_NEAR(w.at(y), 1.0, 1e-12);
  }
}

TEST(CbrsWeights, DefaultProfileRatio) {
  const ClassWeights w = CbrsWeights(DefaultCountProfile());
  EXPECT_NEAR(w.at(Race::kAfrican, Disease::kBasalCellCarcinoma) / w.at(Race::kCaucasian, Disease::kPsoriasis),
              412.0 / 12.0, 1e-9);
}

TEST(SqrsWeights, RatiosFollowInverseRoot) {
  const ClassWeights w = SqrsWeights(TwoClasses(4, 16));
  EXPECT_NEAR(w.at(0) / w.at(1), 2.0, 1e-12);
  // Raw weight 1/sqrt(100) = 0.1 against 1/sqrt(25) = 0.2.
  const ClassWeights v = SqrsWeights(TwoClasses(100, 25));
  EXPECT_NEAR(v.at(0) / v.at(1), 0.1 / 0.2, 1e-12);
  const ClassWeights d = SqrsWeights(DefaultCountProfile());
  const double ratio = d.at(Race::kAfrican, Disease::kBasalCellCarcinoma) / d.at(Race::kCaucasian, Disease::kPsoriasis);
  EXPECT_NEAR(ratio, std::sqrt(412.0 / 12.0), 1e-9);
  EXPECT_NEAR(ratio, 5.86, 0.005);
}

TEST(ClassWeights, AllZeroCountsIsAnError) {
  EXPECT_THROW(CbrsWeights(ClassCountTable{}), EmptyCorpusError);
  EXPECT_THROW(SqrsWeights(ClassCountTable{}), EmptyCorpusError);
}

TEST(ClassWeights, PerSampleWeightsSumToCorpusSize) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    ClassCountTable t;
    for (int y = 0; y < kNumClasses; ++y) t.set(y, static_cast<int>(rng.Below(300)));
    if (t.total() == 0) continue;
    const auto corpus = CorpusOf(t);
    for (auto scheme : {WeightScheme::kUniform, WeightScheme::kCbrs, WeightScheme::kSqrs}) {
      const ClassWeights w = ClassWeights::FromCounts(t, scheme);
      double sum = 0;
      for (const auto& s : corpus) {
        const double v = PerSampleLossWeight(s, w);
        EXPECT_GT(v, 0.0);
        EXPECT_TRUE(std::isfinite(v));
        sum += v;
      }
      EXPECT_NEAR(sum, t.total(), 1e-9);
    }
  }
}

TEST(ClassWeights, SqrsLiesBetweenUniformAndCbrs) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    ClassCountTable t;
    for (int y = 0; y < kNumClasses; ++y) t.set(y, 1 + static_cast<int>(rng.Below(500)));
    const auto u = ClassMass(t, UniformWeights(t));
    const auto c = ClassMass(t, CbrsWeights(t));
    const auto s = ClassMass(t, SqrsWeights(t));
    double tv_us = 0, tv_sc = 0, tv_uc = 0;
    for (int y = 0; y < kNumClasses; ++y) {
      tv_us += std::abs(u[y] - s[y]) / 2;
      tv_sc += std::abs(s[y] - c[y]) / 2;
      tv_uc += std::abs(u[y] - c[y]) / 2;
    }
    EXPECT_GT(tv_us, 0.0);
    EXPECT_GT(tv_sc, 0.0);
    EXPECT_LT(tv_us, tv_uc);
    EXPECT_LT(tv_sc, tv_uc);
  }
}

TEST(ClassWeights, CsvDump) {
  std::ostringstream out;
  CbrsWeights(TwoClasses(10, 40)).WriteCsv(out);
  EXPECT_EQ(out.str(), "race,disease,weight\nasian,acd,2.5\nasian,bcc,0.625\n");
}

TEST(WeightedSampler, UniformFourSamples) {
  const WeightedSampler s(std::vector<double>{1, 1, 1, 1}, Rng(1));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(s.Probability(i), 0.25);
}

TEST(WeightedSampler, ThreeToOneMonteCarlo) {
  WeightedSampler s(std::vector<double>{3, 1}, Rng(2));
  int first = 0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) first += s.Next() == 0 ? 1 : 0;
  EXPECT_NEAR(first / static_cast<double>(n), 0.75, 0.01);
}

TEST(WeightedSampler, CbrsGivesEqualExpectedClassMass) {
  const ClassCountTable t = DefaultCountProfile();
  const auto corpus = CorpusOf(t);
  const WeightedSampler s(corpus, CbrsWeights(t), Rng(3));
  std::array<double, kNumClasses> mass{};
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_GT(s.Probability(i), 0.0);
    mass[corpus[i].label()] += s.Probability(i);
  }
  for (double m : mass) EXPECT_NEAR(m, 1.0 / kNumClasses, 1e-12);
}

TEST(WeightedSampler, EmpiricalClassFrequenciesMatchTargets) {
  const ClassCountTable t = DefaultCountProfile();
  const auto corpus = CorpusOf(t);
  for (auto scheme : {WeightScheme::kUniform, WeightScheme::kCbrs, WeightScheme::kSqrs}) {
    const ClassWeights w = ClassWeights::FromCounts(t, scheme);
    WeightedSampler s(corpus, w, Rng(4).Split(SchemeName(scheme)));
    std::array<double, kNumClasses> hits{};
    const int n = 1000000;
    for (int i = 0; i < n; ++i) hits[corpus[s.Next()].label()] += 1.0 / n;
    const auto target = ClassMass(t, w);
    double l1 = 0;
    for (int y = 0; y < kNumClasses; ++y) l1 += std::abs(hits[y] - target[y]);
    EXPECT_LT(l1, 0.01) << SchemeName(scheme);
  }
}

TEST(WeightedSampler, RejectsDegenerateWeights) {
  EXPECT_THROW(WeightedSampler(std::vector<double>{}, Rng(1)), EmptyCorpusError);
  EXPECT_THROW(WeightedSampler(std::vector<double>{0, 0}, Rng(1)), PreconditionError);
  EXPECT_THROW(WeightedSampler(std::vector<double>{1, -1}, Rng(1)), PreconditionError);
}

// Sampling with probabilities w_i / N and averaging f equals uniform sampling
// of w_i * f_i: the two weight modes agree in expectation.
TEST(WeightModes, SampleAndLossModesAgreeInExpectation) {
  const ClassCountTable t = DefaultCountProfile();
  const auto corpus = CorpusOf(t);
  const ClassWeights w = CbrsWeights(t);
  std::vector<double> f(corpus.size());
  Rng rng(6);
  for (double& v : f) v = rng.Uniform(0, 10);

  const WeightedSampler weighted(corpus, w, Rng(7));
  double exact_sample = 0, exact_loss = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    exact_sample += weighted.Probability(i) * f[i];
    exact_loss += PerSampleLossWeight(corpus[i], w) * f[i] / static_cast<double>(corpus.size());
  }
  EXPECT_NEAR(exact_sample, exact_loss, 1e-9);

  WeightedSampler a(corpus, w, Rng(8)), b(corpus, UniformWeights(t), Rng(9));
  double mc_sample = 0, mc_loss = 0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    mc_sample += f[a.Next()] / n;
    const std::size_t j = b.Next();
    mc_loss += PerSampleLossWeight(corpus[j], w) * f[j] / n;
  }
  EXPECT_NEAR(mc_sample, exact_sample, 0.05);
  EXPECT_NEAR(mc_loss, exact_sample, 0.15);
}

}  // namespace
}  // namespace fairskin
