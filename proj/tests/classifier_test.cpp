// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>

#include "fairskin/classifier/augment.hpp"
#include "fairskin/classifier/train.hpp"
#include "fairskin/data/synthetic.hpp"
#include "fairskin/numerics/grad_check.hpp"
#include "test_util.hpp"

namespace fairskin {
namespace {

Matrix RandomMatrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.Normal();
  return m;
}

ClassifierModel TinyClassifier(std::uint64_t seed, int input_dim = 12) {
  return ClassifierModel::Initialize(ClassifierConfig{input_dim, 8, 6, kNumDiseases}, Rng(seed));
}

TEST(AugmentationPlan, ProportionsSplitPerRaceThenPerDisease) {
  RaceArray<double> w{};
  w[Index(Race::kAfrican)] = 0.3;
  w[Index(Race::kAsian)] = 0.2;
  w[Index(Race::kCaucasian)] = 0.5;
  const AugmentationPlan p = AugmentationPlan::Proportions(7500, w);
  EXPECT_EQ(p.race_total(Race::kAfrican), 2250);
  EXPECT_EQ(p.race_total(Race::kAsian), 1500);
  EXPECT_EQ(p.race_total(Race::kCaucasian), 3750);
  for (Disease d : kAllDiseases) {
    EXPECT_EQ(p.at(Race::kAfrican, d), 450);
    EXPECT_EQ(p.at(Race::kAsian, d), 300);
    EXPECT_EQ(p.at(Race::kCaucasian, d), 750);
  }
  EXPECT_EQ(p.total(), 7500);
}

TEST(AugmentationPlan, UniformAndRemainders) {
  const AugmentationPlan one = AugmentationPlan::Uniform(15);
  for (int y = 0; y < kNumClasses; ++y) EXPECT_EQ(one.at(y), 1);
  const AugmentationPlan odd = AugmentationPlan::Uniform(17);
  EXPECT_EQ(odd.at(0), 2);
  EXPECT_EQ(odd.at(1), 2);
  EXPECT_EQ(odd.at(2), 1);
  EXPECT_EQ(AugmentationPlan::Uniform(0).total(), 0);
  EXPECT_THROW(AugmentationPlan::Uniform(-1), PreconditionError);
}

TEST(AugmentationPlan, TotalsAlwaysMatchRequestedSize) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int total = static_cast<int>(rng.Below(5000));
    RaceArray<double> w{};
    for (double& v : w) v = rng.Uniform(0.01, 1.0);
    ClassCountTable counts;
    for (int y = 0; y < kNumClasses; ++y) counts.set(y, 1 + static_cast<int>(rng.Below(400)));
    for (const AugmentationPlan& p : {AugmentationPlan::Uniform(total), AugmentationPlan::Proportions(total, w),
                                      AugmentationPlan::MatchCounts(total, counts), AugmentationPlan::Balance(total, counts)}) {
      EXPECT_EQ(p.total(), total);
      for (int y = 0; y < kNumClasses; ++y) EXPECT_GE(p.at(y), 0);
    }
  }
}

TEST(AugmentationPlan, MatchCountsFollowsTheClassMix) {
  ClassCountTable t;
  t.set(0, 10);
  t.set(1, 30);
  t.set(4, 60);
  const AugmentationPlan p = AugmentationPlan::MatchCounts(50, t);
  EXPECT_EQ(p.at(0), 5);
  EXPECT_EQ(p.at(1), 15);
  EXPECT_EQ(p.at(4), 30);
  EXPECT_EQ(p.at(2), 0);
  // 10 over thirds: 3.33 each, one extra to the lowest index.
  ClassCountTable e;
  for (int y : {3, 7, 9}) e.set(y, 5);
  const AugmentationPlan q = AugmentationPlan::MatchCounts(10, e);
  EXPECT_EQ(q.at(3), 4);
  EXPECT_EQ(q.at(7), 3);
  EXPECT_EQ(q.at(9), 3);
  EXPECT_THROW(AugmentationPlan::MatchCounts(10, ClassCountTable{}), EmptyCorpusError);
}

TEST(AugmentationPlan, BalanceLevelsTheSmallestClasses) {
  ClassCountTable t;
  for (int y = 0; y < kNumClasses; ++y) t.set(y, 100);
  t.set(3, 10);
  t.set(8, 40);
  const AugmentationPlan p = AugmentationPlan::Balance(100, t);
  // 30 lifts class 3 to 40, the remaining 70 split over {3, 8}: 35 each.
  EXPECT_EQ(p.at(3), 65);
  EXPECT_EQ(p.at(8), 35);
  EXPECT_EQ(p.total(), 100);
  const AugmentationPlan big = AugmentationPlan::Balance(100 + 70 + 13 * 10, t);
  for (int y = 0; y < kNumClasses; ++y) EXPECT_EQ(t.at(y) + big.at(y), 110);
}

TEST(AugmentationPlan, BalancedCombinedCountsAreNearlyLevel) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    ClassCountTable t;
    for (int y = 0; y < kNumClasses; ++y) t.set(y, static_cast<int>(rng.Below(300)));
    const int total = static_cast<int>(rng.Below(4000));
    const AugmentationPlan p = AugmentationPlan::Balance(total, t);
    // Every class that received images ends within 1 of the lowest combined count.
    int lowest = 1 << 30;
    for (int y = 0; y < kNumClasses; ++y) lowest = std::min(lowest, t.at(y) + p.at(y));
    for (int y = 0; y < kNumClasses; ++y)
      if (p.at(y) > 0) {
        EXPECT_LE(t.at(y) + p.at(y), lowest + 1);
      }
  }
}

TEST(AugmentedSet, KeepsRealSamplesAndAppendsPlannedCounts) {
  ClassCountTable t;
  t.set(0, 3);
  t.set(9, 2);
  const auto real = GenerateSynthetic(t, Rng(3));
  DenoiserConfig net;
  net.hidden = 8;
  const DenoiserModel dm = DenoiserModel::Initialize(net, Rng(4));
  const NoiseSchedule s = MakeSchedule(ScheduleKind::kScaledLinear, 5);
  EXPECT_TRUE(BuildAugmentedSet(real, dm, s, AugmentationPlan{}, Rng(5), 16, 16) == real);

  AugmentationPlan plan;
  plan.set(0, 2);
  plan.set(14, 3);
  const auto aug = BuildAugmentedSet(real, dm, s, plan, Rng(5), 16, 16);
  ASSERT_EQ(aug.size(), real.size() + 5);
  EXPECT_TRUE(std::equal(real.begin(), real.end(), aug.begin()));
  std::map<int, int> gen;
  for (std::size_t i = real.size(); i < aug.size(); ++i) {
    EXPECT_EQ(aug[i].origin, Origin::kGenerated);
    ++gen[aug[i].label()];
  }
  EXPECT_EQ(gen[0], 2);
  EXPECT_EQ(gen[14], 3);
}

TEST(DynamicReweight, HandExamples) {
  const RaceArray<double> w = DynamicReweight({0.5, 0.8, 1.0});
  EXPECT_NEAR(w[0], 2.0 * 3 / 4.25, 1e-12);
  EXPECT_NEAR(w[1], 1.25 * 3 / 4.25, 1e-12);
  EXPECT_NEAR(w[2], 1.0 * 3 / 4.25, 1e-12);
  EXPECT_NEAR(w[0], 1.412, 5e-4);
  EXPECT_NEAR(w[1], 0.882, 5e-4);
  EXPECT_NEAR(w[2], 0.706, 5e-4);
  for (double v : DynamicReweight({0.7, 0.7, 0.7})) EXPECT_DOUBLE_EQ(v, 1.0);
  // A_r = 0 clamps to 0.05: raw (20, 1, 1).
  const RaceArray<double> c = DynamicReweight({0.0, 1.0, 1.0});
  EXPECT_NEAR(c[0], 20.0 * 3 / 22, 1e-12);
}

TEST(DynamicReweight, MeanOneAndMonotone) {
  Rng rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    RaceArray<double> a{};
    for (double& v : a) v = rng.Uniform(0, 1);
    const RaceArray<double> w = DynamicReweight(a);
    EXPECT_NEAR((w[0] + w[1] + w[2]) / 3, 1.0, 1e-12);
    RaceArray<double> lower = a;
    lower[1] *= rng.Uniform(0, 1);
    EXPECT_GE(DynamicReweight(lower)[1], w[1] - 1e-12);
  }
}

TEST(ClassifierPredict, SoftmaxAndTieRule) {
  const Matrix equal = Softmax(Matrix::Zero(1, 5));
  for (int j = 0; j < 5; ++j) EXPECT_DOUBLE_EQ(equal(0, j), 0.2);
  EXPECT_EQ(ArgmaxLowest(std::span<const double>(equal.data(), 5)), 0);
  Matrix dominant = Matrix::Zero(1, 5);
  dominant(0, 3) = 100;
  EXPECT_NEAR(Softmax(dominant)(0, 3), 1.0, 1e-12);
  const ClassifierModel m = TinyClassifier(7);
  Rng rng(8);
  const Matrix p = PredictProba(m, RandomMatrix(20, 12, rng));
  for (Eigen::Index i = 0; i < p.rows(); ++i) EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-12);
}

TEST(ClassifierPredict, RowsIgnoreMeanIntensity) {
  const ClassifierModel m = TinyClassifier(9);
  Rng rng(10);
  const Matrix x = RandomMatrix(4, 12, rng);
  const Matrix shifted = (x.array() + 0.37).matrix();
  EXPECT_LT((PredictProba(m, x) - PredictProba(m, shifted)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ClassifierGradient, WeightedCrossEntropyMatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(100 + seed);
    ClassifierModel m = TinyClassifier(seed);
    m.theta += 0.1 * RandomMatrix(m.theta.size(), 1, rng).col(0);
    const Matrix x = RandomMatrix(6, 12, rng);
    std::vector<int> labels(6);
    std::vector<double> w(6);
    for (int i = 0; i < 6; ++i) {
      labels[static_cast<std::size_t>(i)] = static_cast<int>(rng.Below(5));
      w[static_cast<std::size_t>(i)] = rng.Uniform(0.2, 2.0);
    }
    const CrossEntropyValue v = WeightedCrossEntropy(m, x, labels, w);
    const auto f = [&](std::span<const double> p) {
      ClassifierModel probe = m;
      probe.theta = Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size()));
      return WeightedCrossEntropy(probe, x, labels, w).loss;
    };
    const auto idx = SampleIndices(static_cast<std::size_t>(m.theta.size()), 150, rng);
    EXPECT_LT(GradCheck(f, std::span<const double>(m.theta.data(), m.theta.size()),
                        std::span<const double>(v.grad.data(), v.grad.size()), idx),
              1e-4)
        << "seed " << seed;
  }
}

TEST(ClassifierGradient, UnitWeightsEqualUnweighted) {
  const ClassifierModel m = TinyClassifier(11);
  Rng rng(12);
  const Matrix x = RandomMatrix(5, 12, rng);
  const std::vector<int> labels = {0, 1, 2, 3, 4};
  const auto a = WeightedCrossEntropy(m, x, labels);
  const auto b = WeightedCrossEntropy(m, x, labels, std::vector<double>(5, 1.0));
  EXPECT_EQ(a.loss, b.loss);
  EXPECT_EQ(a.grad, b.grad);
  EXPECT_THROW(WeightedCrossEntropy(m, x, std::vector<int>{0, 1}), PreconditionError);
  EXPECT_THROW(WeightedCrossEntropy(m, x, std::vector<int>{0, 1, 2, 3, 5}), PreconditionError);
}

std::vector<Sample> SplitOf(int per_class, std::uint64_t seed) {
  ClassCountTable t;
  for (int y = 0; y < kNumClasses; ++y) t.set(y, per_class);
  return GenerateSynthetic(t, Rng(seed));
}

TEST(EpochRaceAccuracy, MatchesHandCount) {
  const auto val = SplitOf(4, 13);
  const ClassifierModel m = TinyClassifier(14, 256);
  const auto pred = PredictLabels(m, StackImages(val));
  RaceArray<int> hit{}, tot{};
  for (std::size_t i = 0; i < val.size(); ++i) {
    ++tot[Index(val[i].race)];
    hit[Index(val[i].race)] += pred[i] == Index(val[i].disease) ? 1 : 0;
  }
  const RaceAccuracy a = EpochRaceAccuracy(m, val);
  for (int r = 0; r < kNumRaces; ++r) EXPECT_DOUBLE_EQ(a.per_race[r], static_cast<double>(hit[r]) / tot[r]);
  std::vector<Sample> no_african;
  for (const auto& s : val)
    if (s.race != Race::kAfrican) no_african.push_back(s);
  EXPECT_THROW(EpochRaceAccuracy(m, no_african), MissingGroupError);
}

TEST(TrainClassifier, LearnsTheSyntheticTaskAndIsDeterministic) {
  const auto train = SplitOf(120, 15), val = SplitOf(8, 16);
  ClassifierTrainConfig cfg;
  cfg.epochs = 10;
  cfg.reweight_mode = ReweightMode::kLoss;
  cfg.seed = 3;
  const auto a = TrainClassifier(train, val, cfg);
  const auto b = TrainClassifier(train, val, cfg);
  ASSERT_EQ(a.epochs.size(), 10u);
  EXPECT_EQ(a.model.theta, b.model.theta);
  for (std::size_t e = 0; e < a.epochs.size(); ++e) {
    EXPECT_EQ(a.epochs[e].validation.per_race, b.epochs[e].validation.per_race);
    EXPECT_EQ(a.epochs[e].weights, b.epochs[e].weights);
    EXPECT_NEAR((a.epochs[e].weights[0] + a.epochs[e].weights[1] + a.epochs[e].weights[2]) / 3, 1.0, 1e-12);
  }
  for (double w : a.epochs[0].weights) EXPECT_EQ(w, 1.0);
  EXPECT_GE(EpochRaceAccuracy(a.model, train).overall, 0.9);
}

TEST(TrainClassifier, SeparableToyFeaturesReachFullTrainAccuracy) {
  // One bright pixel per disease: linearly separable after centering.
  std::vector<Sample> train;
  Rng rng(17);
  for (int i = 0; i < 150; ++i) {
    Sample s;
    s.image = Image(4, 4, 0.5);
    s.disease = static_cast<Disease>(i % kNumDiseases);
    s.race = static_cast<Race>((i / kNumDiseases) % kNumRaces);
    s.image.pixels[static_cast<std::size_t>(Index(s.disease))] = 1.0;
    for (double& v : s.image.pixels) v += 0.01 * rng.Normal();
    train.push_back(s);
  }
  ClassifierTrainConfig cfg;
  cfg.epochs = 10;
  const auto r = TrainClassifier(train, train, cfg);
  EXPECT_GE(EpochRaceAccuracy(r.model, train).overall, 0.99);
}

TEST(TrainClassifier, DisabledReweightingMatchesPlainTraining) {
  const auto train = SplitOf(10, 18), val = SplitOf(2, 19);
  ClassifierTrainConfig cfg;
  cfg.epochs = 3;
  cfg.reweight_mode = ReweightMode::kOff;
  const auto off = TrainClassifier(train, val, cfg);
  // With equal per-race accuracy the loss mode keeps weights at 1 for the
  // first epoch only; epoch 1 trajectories must coincide.
  cfg.epochs = 1;
  cfg.reweight_mode = ReweightMode::kLoss;
  const auto loss = TrainClassifier(train, val, cfg);
  cfg.reweight_mode = ReweightMode::kOff;
  EXPECT_EQ(TrainClassifier(train, val, cfg).model.theta, loss.model.theta);
  EXPECT_EQ(off.epochs.back().weights, (RaceArray<double>{1.0, 1.0, 1.0}));
}

TEST(TrainClassifier, EpochCsvAndCheckpoint) {
  const TempDir dir;
  const auto train = SplitOf(4, 20), val = SplitOf(2, 21);
  ClassifierTrainConfig cfg;
  cfg.epochs = 2;
  const auto r = TrainClassifier(train, val, cfg);
  WriteEpochCsv(dir.path() / "epochs.csv", r.epochs);
  std::ifstream in(dir.path() / "epochs.csv");
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header, "epoch,acc_overall,acc_asian,acc_african,acc_caucasian,w_asian,w_african,w_caucasian,loss");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2);
  SaveClassifier(dir.path() / "clf.ckpt", r.model);
  EXPECT_EQ(LoadClassifier(dir.path() / "clf.ckpt", r.model.config).theta, r.model.theta);
  ClassifierConfig other = r.model.config;
  other.hidden2 = 32;
  EXPECT_THROW(LoadClassifier(dir.path() / "clf.ckpt", other), PreconditionError);
  EXPECT_THROW(TrainClassifier({}, val, cfg), EmptyCorpusError);
  EXPECT_THROW(TrainClassifier(train, {}, cfg), EmptyCorpusError);
}

}  // namespace
}  // namespace fairskin
