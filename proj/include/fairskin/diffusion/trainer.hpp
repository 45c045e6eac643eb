// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "fairskin/data/sample.hpp"
#include "fairskin/diffusion/denoiser.hpp"
#include "fairskin/diffusion/objective.hpp"
#include "fairskin/numerics/checkpoint.hpp"
#include "fairskin/resampling/sampler.hpp"

namespace fairskin {

/// Fixed part of the noise prediction: a Gaussian fit of the training images,
/// an isotropic N(0, 0.5^2) prior, or nothing.
enum class PreconditionerKind { kGaussian, kIsotropic, kNone };

inline GaussianPreconditioner MakePreconditioner(PreconditionerKind kind, const NoiseSchedule& sched,
                                                 const Matrix& model_space_images) {
  switch (kind) {
    case PreconditionerKind::kGaussian: return GaussianPreconditioner::Fit(AlphaBarTable(sched), model_space_images);
    case PreconditionerKind::kIsotropic:
      return GaussianPreconditioner::Isotropic(AlphaBarTable(sched), static_cast<int>(model_space_images.cols()), 0.5);
    case PreconditionerKind::kNone: break;
  }
  return {};
}

struct DiffusionTrainConfig {
  int steps = 20000;
  int batch_size = 32;
  double learning_rate = 1e-3;
  // Larger values (0.01 and up) erase class conditioning on the toy corpus.
  double gamma = 0.001;
  bool stop_gradient = false;
  WeightScheme weight_scheme = WeightScheme::kUniform;
  WeightMode weight_mode = WeightMode::kSample;
  int timesteps = 100;
  ScheduleKind schedule = ScheduleKind::kScaledLinear;
  PreconditionerKind preconditioner = PreconditionerKind::kGaussian;
  int hidden = 256;
  std::uint64_t seed = 0;
  int log_every = 100;
};

/// Window means of the losses, one record per `log_every` steps.
struct LossRecord {
  int step;
  double loss_dm;
  double loss_r;
  double total;
};

class DivergenceError : public NumericError {
 public:
  DivergenceError(int step, DenoiserModel last_good)
      : NumericError("diffusion training diverged at step " + std::to_string(step)),
        step_(step),
        last_good_(std::move(last_good)) {}
  int step() const { return step_; }
  const DenoiserModel& last_good() const { return last_good_; }

 private:
  int step_;
  DenoiserModel last_good_;
};

struct DiffusionTrainResult {
  DenoiserModel model;
  NoiseSchedule schedule;
  std::vector<LossRecord> curve;
};

/// Minimizes L_DM + gamma * L_r with Adam. Batches come from the weighted
/// sampler in `sample` mode, or uniformly with per-sample loss weights in
/// `loss` mode. Deterministic given the seed.
inline DiffusionTrainResult TrainDiffusion(const std::vector<Sample>& train, const DiffusionTrainConfig& cfg) {
  if (train.empty()) throw EmptyCorpusError("train_dm: empty training split");
  if (cfg.steps <= 0 || cfg.batch_size <= 0) throw PreconditionError("train_dm: steps and batch size must be positive");
  if (cfg.gamma < 0.0) throw PreconditionError("train_dm: gamma must be non-negative");

  const Rng root(cfg.seed);
  DenoiserConfig net;
  net.image_dim = static_cast<int>(train.front().image.size());
  net.hidden = cfg.hidden;
  DiffusionTrainResult result{DenoiserModel::Initialize(net, root.Split("dm/init")),
                              MakeSchedule(cfg.schedule, cfg.timesteps), {}};
  DenoiserModel& model = result.model;

  const ClassCountTable counts = ClassCountTable::FromSamples(train);
  const ClassWeights scheme_weights = ClassWeights::FromCounts(counts, cfg.weight_scheme);
  const bool loss_mode = cfg.weight_mode == WeightMode::kLoss;
  WeightedSampler batches = loss_mode ? WeightedSampler(train, UniformWeights(counts), root.Split("dm/batches"))
                                      : WeightedSampler(train, scheme_weights, root.Split("dm/batches"));
  Rng noise_rng = root.Split("dm/noise");

  const Matrix all = ToModelSpace(StackImages(train));
  model.precond = MakePreconditioner(cfg.preconditioner, result.schedule, all);
  Adam adam(model.theta.size(), AdamConfig{cfg.learning_rate});
  ObjectiveOptions opt;
  opt.gamma = cfg.gamma;
  opt.stop_gradient = cfg.stop_gradient;

  Matrix x0(cfg.batch_size, all.cols());
  std::vector<int> labels(static_cast<std::size_t>(cfg.batch_size));
  std::vector<double> weights;
  double w_dm = 0, w_r = 0, w_total = 0;
  int in_window = 0;
  DenoiserModel last_good = model;
  for (int step = 1; step <= cfg.steps; ++step) {
    if (loss_mode) weights.assign(static_cast<std::size_t>(cfg.batch_size), 1.0);
    for (int b = 0; b < cfg.batch_size; ++b) {
      const std::size_t i = batches.Next();
      x0.row(b) = all.row(static_cast<Eigen::Index>(i));
      labels[static_cast<std::size_t>(b)] = train[i].label();
      if (loss_mode) weights[static_cast<std::size_t>(b)] = PerSampleLossWeight(train[i], scheme_weights);
    }
    const NoiseDraw draw = DrawNoise(cfg.batch_size, all.cols(), result.schedule.steps(), noise_rng);
    const Matrix x_t = NoisedBatch(result.schedule, x0, draw);
    const LossValue v = EvaluateLosses(model, x_t, draw.t, labels, &draw.eps, weights, opt);
    if (!std::isfinite(v.total) || !v.grad.allFinite()) throw DivergenceError(step, last_good);
    if (cfg.log_every > 0 && step % cfg.log_every == 1 % cfg.log_every) last_good = model;
    adam.Step(model.theta, v.grad);

    w_dm += v.loss_dm;
    w_r += v.loss_r;
    w_total += v.total;
    ++in_window;
    if (cfg.log_every > 0 && (step % cfg.log_every == 0 || step == cfg.steps)) {
      result.curve.push_back({step, w_dm / in_window, w_r / in_window, w_total / in_window});
      w_dm = w_r = w_total = 0;
      in_window = 0;
    }
  }
  return result;
}

inline void WriteLossCurve(const std::filesystem::path& path, const std::vector<LossRecord>& curve) {
  std::ofstream out(path);
  out.precision(10);
  out << "step,loss_dm,loss_r,total\n";
  for (const auto& r : curve) out << r.step << "," << r.loss_dm << "," << r.loss_r << "," << r.total << "\n";
}

inline constexpr std::uint32_t kDenoiserCheckpointKind = 1;

/// Denoiser checkpoint; the header stores the architecture and the schedule.
inline void SaveDenoiser(const std::filesystem::path& path, const DenoiserModel& m, ScheduleKind kind,
                         int timesteps) {
  const auto& c = m.config;
  Vector aux;
  if (!m.precond.empty()) {
    const auto d = m.precond.mean.size();
    aux.resize(2 * d + d * d);
    aux << m.precond.mean, m.precond.variances, Eigen::Map<const Vector>(m.precond.basis.data(), d * d);
  }
  WriteCheckpoint(path, {kDenoiserCheckpointKind,
                         {c.image_dim, c.time_dim, c.class_dim, c.hidden, c.num_classes, static_cast<int>(kind),
                          timesteps},
                         m.theta, aux});
}

struct LoadedDenoiser {
  DenoiserModel model;
  NoiseSchedule schedule;
};

inline LoadedDenoiser LoadDenoiser(const std::filesystem::path& path,
                                   const std::optional<DenoiserConfig>& expected = std::nullopt) {
  const CheckpointBlob blob = ReadCheckpoint(path, kDenoiserCheckpointKind);
  if (blob.config.size() != 7) throw PreconditionError("denoiser checkpoint: bad config header");
  DenoiserConfig c;
  c.image_dim = static_cast<int>(blob.config[0]);
  c.time_dim = static_cast<int>(blob.config[1]);
  c.class_dim = static_cast<int>(blob.config[2]);
  c.hidden = static_cast<int>(blob.config[3]);
  c.num_classes = static_cast<int>(blob.config[4]);
  if (expected && !(*expected == c)) throw PreconditionError("denoiser checkpoint: architecture mismatch");
  if (DenoiserLayout(c).total != blob.params.size()) throw PreconditionError("denoiser checkpoint: parameter count mismatch");
  const auto kind = blob.config[5];
  if (kind != 0 && kind != 1) throw PreconditionError("denoiser checkpoint: unknown schedule kind");
  if (blob.config[6] < 1) throw PreconditionError("denoiser checkpoint: bad schedule length");
  LoadedDenoiser out{DenoiserModel(c), MakeSchedule(static_cast<ScheduleKind>(kind), static_cast<int>(blob.config[6]))};
  out.model.theta = blob.params;
  if (blob.aux.size() != 0) {
    const Eigen::Index d = c.image_dim;
    if (blob.aux.size() != 2 * d + d * d) throw PreconditionError("denoiser checkpoint: bad preconditioner block");
    Matrix basis(d, d);
    std::copy(blob.aux.data() + 2 * d, blob.aux.data() + blob.aux.size(), basis.data());
    out.model.precond = GaussianPreconditioner::FromEigen(AlphaBarTable(out.schedule), blob.aux.head(d),
                                                          std::move(basis), blob.aux.segment(d, d));
  }
  return out;
}

}  // namespace fairskin
