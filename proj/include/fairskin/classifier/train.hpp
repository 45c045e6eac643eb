// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "fairskin/classifier/model.hpp"
#include "fairskin/data/sample.hpp"
#include "fairskin/resampling/sampler.hpp"

namespace fairskin {

/// How per-race weights w_r enter classifier training: as loss multipliers, as
/// sampling rates for the epoch's draw, or not at all.
enum class ReweightMode { kLoss, kResample, kOff };

struct RaceAccuracy {
  double overall = 0.0;
  RaceArray<double> per_race{};
};

/// Disease accuracy within each race. Every race must be present.
inline RaceAccuracy EpochRaceAccuracy(const ClassifierModel& m, const std::vector<Sample>& split) {
  RaceArray<int> total{}, correct{};
  const std::vector<int> pred = split.empty() ? std::vector<int>{} : PredictLabels(m, StackImages(split));
  for (std::size_t i = 0; i < split.size(); ++i) {
    const auto r = static_cast<std::size_t>(Index(split[i].race));
    ++total[r];
    if (pred[i] == Index(split[i].disease)) ++correct[r];
  }
  RaceAccuracy acc;
  int all = 0, all_correct = 0;
  for (Race r : kAllRaces) {
    const auto k = static_cast<std::size_t>(Index(r));
    if (total[k] == 0) throw MissingGroupError("no " + std::string(RaceName(r)) + " samples in evaluation split");
    acc.per_race[k] = static_cast<double>(correct[k]) / total[k];
    all += total[k];
    all_correct += correct[k];
  }
  acc.overall = static_cast<double>(all_correct) / all;
  return acc;
}

inline constexpr double kMinReweightAccuracy = 0.05;

/// w_r = 1 / max(A_r, 0.05), scaled to mean 1 over races.
inline RaceArray<double> DynamicReweight(const RaceArray<double>& acc) {
  RaceArray<double> w{};
  double sum = 0.0;
  for (std::size_t r = 0; r < w.size(); ++r) sum += (w[r] = 1.0 / std::max(acc[r], kMinReweightAccuracy));
  for (double& v : w) v *= static_cast<double>(w.size()) / sum;
  return w;
}

struct ClassifierTrainConfig {
  int epochs = 10;
  int batch_size = 64;
  double learning_rate = 1e-3;
  int hidden1 = 128;
  int hidden2 = 64;
  ReweightMode reweight_mode = ReweightMode::kOff;
  std::uint64_t seed = 0;
};

struct EpochRecord {
  int epoch;
  RaceAccuracy validation;
  /// Weights in effect during this epoch.
  RaceArray<double> weights;
  double loss;
};

struct ClassifierTrainResult {
  ClassifierModel model;
  std::vector<EpochRecord> epochs;
};

/// Weighted cross-entropy with Adam. Weights start uniform and are refreshed
/// after every epoch from the validation accuracy per race.
inline ClassifierTrainResult TrainClassifier(const std::vector<Sample>& train, const std::vector<Sample>& validation,
                                             const ClassifierTrainConfig& cfg) {
  if (train.empty()) throw EmptyCorpusError("train_clf: empty training set");
  if (validation.empty()) throw EmptyCorpusError("train_clf: empty validation split");
  if (cfg.epochs <= 0 || cfg.batch_size <= 0) throw PreconditionError("train_clf: epochs and batch size must be positive");

  const Rng root(cfg.seed);
  const Matrix x_all = StackImages(train);
  ClassifierConfig net{static_cast<int>(x_all.cols()), cfg.hidden1, cfg.hidden2, kNumDiseases};
  ClassifierTrainResult result{ClassifierModel::Initialize(net, root.Split("clf/init")), {}};
  ClassifierModel& model = result.model;
  Adam adam(model.theta.size(), AdamConfig{cfg.learning_rate});

  const std::size_t n = train.size();
  RaceArray<double> weights;
  weights.fill(1.0);
  std::vector<std::size_t> order(n);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const Rng epoch_rng = root.Split("clf/epoch/" + std::to_string(epoch));
    if (cfg.reweight_mode == ReweightMode::kResample) {
      std::vector<double> per_index(n);
      for (std::size_t i = 0; i < n; ++i) per_index[i] = weights[static_cast<std::size_t>(Index(train[i].race))];
      WeightedSampler draw(per_index, epoch_rng.Split("resample"));
      for (auto& i : order) i = draw.Next();
    } else {
      std::iota(order.begin(), order.end(), std::size_t{0});
      Rng shuffle = epoch_rng.Split("shuffle");
      shuffle.Shuffle(order.begin(), order.end());
    }

    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
      Matrix x(static_cast<Eigen::Index>(stop - start), x_all.cols());
      std::vector<int> labels(stop - start);
      std::vector<double> w;
      if (cfg.reweight_mode == ReweightMode::kLoss) w.resize(stop - start);
      for (std::size_t i = start; i < stop; ++i) {
        const std::size_t s = order[i];
        x.row(static_cast<Eigen::Index>(i - start)) = x_all.row(static_cast<Eigen::Index>(s));
        labels[i - start] = Index(train[s].disease);
        if (!w.empty()) w[i - start] = weights[static_cast<std::size_t>(Index(train[s].race))];
      }
      const CrossEntropyValue v = WeightedCrossEntropy(model, x, labels, w);
      if (!std::isfinite(v.loss) || !v.grad.allFinite())
        throw NumericError("classifier training diverged in epoch " + std::to_string(epoch));
      adam.Step(model.theta, v.grad);
      loss_sum += v.loss;
      ++batches;
    }

    EpochRecord rec{epoch, EpochRaceAccuracy(model, validation), weights, loss_sum / static_cast<double>(batches)};
    result.epochs.push_back(rec);
    if (cfg.reweight_mode != ReweightMode::kOff) weights = DynamicReweight(rec.validation.per_race);
  }
  return result;
}

inline void WriteEpochCsv(const std::filesystem::path& path, const std::vector<EpochRecord>& epochs) {
  std::ofstream out(path);
  out.precision(10);
  out << "epoch,acc_overall,acc_asian,acc_african,acc_caucasian,w_asian,w_african,w_caucasian,loss\n";
  for (const auto& e : epochs) {
    out << e.epoch << "," << e.validation.overall;
    for (double a : e.validation.per_race) out << "," << a;
    for (double w : e.weights) out << "," << w;
    out << "," << e.loss << "\n";
  }
}

}  // namespace fairskin
