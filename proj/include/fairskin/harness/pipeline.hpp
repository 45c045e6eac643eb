// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairskin/classifier/augment.hpp"
#include "fairskin/classifier/train.hpp"
#include "fairskin/data/ingest.hpp"
#include "fairskin/data/split.hpp"
#include "fairskin/data/synthetic.hpp"
#include "fairskin/diffusion/trainer.hpp"
#include "fairskin/harness/config.hpp"
#include "fairskin/metrics/features.hpp"
#include "fairskin/metrics/fid.hpp"
#include "fairskin/metrics/report.hpp"
#include "fairskin/metrics/scores.hpp"

namespace fairskin {

/// Child seed for a named stage, independent across names.
inline std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view name) {
  return detail::Mix64(seed ^ detail::Mix64(detail::Fnv1a64(name) + detail::kGolden));
}

inline std::filesystem::path DefaultOutputRoot() {
  if (const char* env = std::getenv("FAIRSKIN_OUT"); env != nullptr && *env != '\0') return env;
  return "runs";
}

inline std::filesystem::path RunDirectory(const ExperimentConfig& c) {
  const std::filesystem::path root = c.out.empty() ? DefaultOutputRoot() : std::filesystem::path(c.out);
  return root / ConfigHash(c);
}

/// Loads or generates the corpus and splits it 8:1:1 per class.
inline DatasetSplit LoadDataset(const ExperimentConfig& c) {
  const Rng root(c.seed);
  std::vector<Sample> all;
  if (!c.manifest.empty()) {
    const std::filesystem::path dir =
        c.image_dir.empty() ? std::filesystem::path(c.manifest).parent_path() : std::filesystem::path(c.image_dir);
    all = IngestExternal(c.manifest, dir, c.height, c.width);
    if (all.empty()) throw EmptyCorpusError("manifest lists no samples");
  } else {
    all = GenerateSynthetic(ParseProfile(c.profile), root.Split("data"), {c.height, c.width, c.pixel_noise, c.position_jitter});
  }
  return Split811(all, root.Split("split"));
}

inline DiffusionTrainConfig DiffusionConfigFor(const ExperimentConfig& c) {
  const MethodMechanism mech = MechanismOf(c.method);
  DiffusionTrainConfig d;
  d.steps = c.dm_steps;
  d.batch_size = c.dm_batch;
  d.learning_rate = c.dm_lr;
  d.gamma = mech.uses_gamma ? c.gamma : 0.0;
  d.stop_gradient = c.stop_gradient;
  d.weight_scheme = mech.scheme;
  d.weight_mode = c.weight_mode;
  d.timesteps = c.timesteps;
  d.schedule = c.schedule;
  d.preconditioner = c.preconditioner;
  d.hidden = c.dm_hidden;
  d.seed = DeriveSeed(c.seed, "dm");
  return d;
}

/// The augmentation plan a config resolves to. `auto` picks the balancing
/// plan for fairskin methods and the uniform plan otherwise.
inline AugmentationPlan ResolvePlan(const ExperimentConfig& c, const ClassCountTable& train_counts) {
  const MethodMechanism mech = MechanismOf(c.method);
  if (!mech.trains_dm) return {};
  AugPlanKind kind = c.aug_plan;
  if (kind == AugPlanKind::kAuto) kind = mech.level3 ? AugPlanKind::kBalance : AugPlanKind::kUniform;
  switch (kind) {
    case AugPlanKind::kNone: return {};
    case AugPlanKind::kUniform: return AugmentationPlan::Uniform(c.aug_total);
    case AugPlanKind::kProportions: return AugmentationPlan::Proportions(c.aug_total, ParseRaceProportions(c.aug_proportions));
    case AugPlanKind::kBalance: return AugmentationPlan::Balance(c.aug_total, train_counts);
    case AugPlanKind::kAuto: break;
  }
  return {};
}

inline ClassifierTrainConfig ClassifierConfigFor(const ExperimentConfig& c) {
  ClassifierTrainConfig t;
  t.epochs = c.clf_epochs;
  t.batch_size = c.clf_batch;
  t.learning_rate = c.clf_lr;
  t.reweight_mode = MechanismOf(c.method).level3 ? c.reweight_mode : ReweightMode::kOff;
  t.seed = DeriveSeed(c.seed, "clf");
  return t;
}

/// Classifier trained on the real training split only; shared by every
/// method run with the same seed, so its features compare across methods.
inline ClassifierModel TrainReferenceClassifier(const ExperimentConfig& c, const DatasetSplit& data) {
  ClassifierTrainConfig t = ClassifierConfigFor(c);
  t.reweight_mode = ReweightMode::kOff;
  t.seed = DeriveSeed(c.seed, "reference");
  return TrainClassifier(data.train, data.validation, t).model;
}

/// `eval_total` generated images with the class mix of the training split, so
/// that per-group FID compares like with like. Independent of the augmentation draw.
inline std::vector<Sample> GenerateEvaluationSet(const ExperimentConfig& c, const DenoiserModel& dm,
                                                 const NoiseSchedule& sched, const ClassCountTable& train_counts) {
  return BuildAugmentedSet({}, dm, sched, AugmentationPlan::MatchCounts(c.eval_total, train_counts),
                           Rng(c.seed).Split("eval-gen"), c.height, c.width);
}

struct EvaluationInputs {
  const DatasetSplit* data = nullptr;
  const ClassifierModel* downstream = nullptr;
  /// Null when no generator was trained.
  const std::vector<Sample>* generated = nullptr;
  const ClassifierModel* reference = nullptr;
};

struct EvaluationOutput {
  MetricsReport report;
  std::vector<GroupFid> groups;
  Matrix real_features, generated_features;
};

inline std::vector<int> RacesOf(const std::vector<Sample>& s) {
  std::vector<int> r(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) r[i] = Index(s[i].race);
  return r;
}

inline std::vector<int> LabelsOf(const std::vector<Sample>& s) {
  std::vector<int> r(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) r[i] = s[i].label();
  return r;
}

/// Downstream accuracy, DP and ESSP on the test split; FID and IS of the
/// generated set against the real training split.
inline EvaluationOutput Evaluate(const ExperimentConfig& c, const EvaluationInputs& in) {
  EvaluationOutput out;
  MetricsReport& r = out.report;
  const auto& test = in.data->test;
  if (test.empty()) throw EmptyCorpusError("evaluation: empty test split");
  const RaceAccuracy acc = EpochRaceAccuracy(*in.downstream, test);
  r.acc_overall = 100.0 * acc.overall;
  for (std::size_t k = 0; k < acc.per_race.size(); ++k) r.acc_per_race[k] = 100.0 * acc.per_race[k];
  r.dp = DemographicParity(PredictLabels(*in.downstream, StackImages(test)), RacesOf(test));
  r.essp = Essp(r.acc_overall, r.dp);

  if (in.generated == nullptr || in.generated->empty()) return out;
  const Matrix real_x = StackImages(in.data->train);
  const Matrix gen_x = StackImages(*in.generated);
  const ClassifierModel& scorer = c.fid_features == FeatureSource::kDownstream ? *in.downstream : *in.reference;
  if (c.fid_features == FeatureSource::kRandom) {
    const RandomProjection proj(static_cast<int>(real_x.cols()));
    out.real_features = proj(real_x);
    out.generated_features = proj(gen_x);
  } else {
    out.real_features = ClassifierFeatures(scorer, real_x);
    out.generated_features = ClassifierFeatures(scorer, gen_x);
  }
  r.fid_overall = FidBetween(out.real_features, out.generated_features);
  const auto races = FidPerGroup(out.real_features, RacesOf(in.data->train), out.generated_features,
                                 RacesOf(*in.generated), kNumRaces);
  for (const auto& g : races) r.fid_per_race[static_cast<std::size_t>(g.group)] = g.fid;
  out.groups = c.fid_grouping == FidGrouping::kRace
                   ? races
                   : FidPerGroup(out.real_features, LabelsOf(in.data->train), out.generated_features,
                                 LabelsOf(*in.generated), kNumClasses);
  int sufficient = 0;
  for (const auto& g : out.groups) sufficient += g.sufficient() ? 1 : 0;
  if (sufficient >= 2) r.fid_variance = FidVariance(out.groups);

  // Contiguous IS splits over a shuffled order so that each split mixes classes.
  Matrix probs = PredictProba(scorer, gen_x);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(probs.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng shuffle = Rng(c.seed).Split("is-shuffle");
  shuffle.Shuffle(order.begin(), order.end());
  Matrix shuffled(probs.rows(), probs.cols());
  for (std::size_t i = 0; i < order.size(); ++i) shuffled.row(static_cast<Eigen::Index>(i)) = probs.row(order[i]);
  if (shuffled.rows() >= c.is_splits) {
    const InceptionScore is = InceptionStyleScore(shuffled, c.is_splits);
    r.is_mean = is.mean;
    r.is_std = is.std;
  }
  return out;
}

struct StageTiming {
  std::string stage;
  double seconds;
};

struct RunRecord {
  std::string config_hash;
  ExperimentConfig config;
  std::filesystem::path directory;
  std::vector<StageTiming> timings;
  MetricsReport report;
  std::vector<LossRecord> loss_curve;
  std::vector<EpochRecord> epochs;
};

inline nlohmann::ordered_json RunRecordJson(const RunRecord& rec) {
  nlohmann::ordered_json j;
  j["config_hash"] = rec.config_hash;
  j["method"] = MethodName(rec.config.method);
  j["seed"] = rec.config.seed;
  nlohmann::ordered_json options = nlohmann::ordered_json::object();
  for (const auto& k : MetricOptionKeys()) options[k] = GetConfigValue(rec.config, k);
  j["metric_options"] = options;
  nlohmann::ordered_json timings = nlohmann::ordered_json::object();
  for (const auto& t : rec.timings) timings[t.stage] = t.seconds;
  j["timings_seconds"] = timings;
  j["report"] = ToJson(rec.report);
  nlohmann::ordered_json files = nlohmann::ordered_json::object();
  for (const char* name : {"config.txt", "dm.ckpt", "clf.ckpt", "losses.csv", "epochs.csv", "report.json", "report.txt"})
    if (std::filesystem::exists(rec.directory / name)) files[name] = (rec.directory / name).string();
  j["files"] = files;
  return j;
}

inline void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write " + path.string());
  out << text;
}

enum class Stage { kData, kTrainDm, kSample, kTrainClf, kEval };

inline const char* StageName(Stage s) {
  switch (s) {
    case Stage::kData: return "data";
    case Stage::kTrainDm: return "train-dm";
    case Stage::kSample: return "sample";
    case Stage::kTrainClf: return "train-clf";
    case Stage::kEval: return "eval";
  }
  return "?";
}

struct RunOptions {
  /// Last stage to execute.
  Stage until = Stage::kEval;
  /// Load dm.ckpt from the run directory instead of retraining when present.
  bool reuse_dm = false;
  /// Same for clf.ckpt.
  bool reuse_clf = false;
};

/// data -> train-dm -> sample -> train-clf -> eval, writing artifacts to the
/// run directory as each stage completes. A failing stage is rethrown as
/// StageError; earlier artifacts stay on disk.
inline RunRecord RunExperiment(const ExperimentConfig& c, const RunOptions& opt = {}) {
  ValidateConfig(c);
  RunRecord rec;
  rec.config = c;
  rec.config_hash = ConfigHash(c);
  rec.directory = RunDirectory(c);
  std::filesystem::create_directories(rec.directory);
  WriteTextFile(rec.directory / "config.txt", CanonicalConfig(c));

  const MethodMechanism mech = MechanismOf(c.method);
  auto run_stage = [&](Stage s, auto&& body) {
    const auto start = std::chrono::steady_clock::now();
    try {
      body();
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(StageName(s), e.what());
    }
    rec.timings.push_back({StageName(s), std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()});
  };
  auto write_record = [&] { WriteTextFile(rec.directory / "run.json", RunRecordJson(rec).dump(2) + "\n"); };

  DatasetSplit data;
  run_stage(Stage::kData, [&] { data = LoadDataset(c); });
  if (opt.until == Stage::kData) return write_record(), rec;

  std::optional<DenoiserModel> dm;
  NoiseSchedule schedule;
  if (mech.trains_dm) {
    run_stage(Stage::kTrainDm, [&] {
      const auto ckpt = rec.directory / "dm.ckpt";
      if (opt.reuse_dm && std::filesystem::exists(ckpt)) {
        LoadedDenoiser loaded = LoadDenoiser(ckpt);
        dm = std::move(loaded.model);
        schedule = std::move(loaded.schedule);
        return;
      }
      const DiffusionTrainConfig dcfg = DiffusionConfigFor(c);
      try {
        DiffusionTrainResult trained = TrainDiffusion(data.train, dcfg);
        SaveDenoiser(ckpt, trained.model, dcfg.schedule, dcfg.timesteps);
        WriteLossCurve(rec.directory / "losses.csv", trained.curve);
        rec.loss_curve = std::move(trained.curve);
        dm = std::move(trained.model);
        schedule = std::move(trained.schedule);
      } catch (const DivergenceError& e) {
        SaveDenoiser(rec.directory / "dm.last-good.ckpt", e.last_good(), dcfg.schedule, dcfg.timesteps);
        throw;
      }
    });
  }
  if (opt.until == Stage::kTrainDm) return write_record(), rec;

  std::vector<Sample> augmented;
  run_stage(Stage::kSample, [&] {
    const AugmentationPlan plan = ResolvePlan(c, ClassCountTable::FromSamples(data.train));
    if (!dm || plan.total() == 0) {
      augmented = data.train;
      return;
    }
    augmented = BuildAugmentedSet(data.train, *dm, schedule, plan, Rng(c.seed).Split("augment"), c.height, c.width);
    if (c.export_samples) {
      const std::vector<Sample> generated(augmented.begin() + static_cast<std::ptrdiff_t>(data.train.size()),
                                          augmented.end());
      std::filesystem::remove_all(rec.directory / "samples");
      ExportSamples(generated, rec.directory / "samples", "gen_");
    }
  });
  if (opt.until == Stage::kSample) return write_record(), rec;

  ClassifierModel downstream;
  run_stage(Stage::kTrainClf, [&] {
    const auto ckpt = rec.directory / "clf.ckpt";
    if (opt.reuse_clf && std::filesystem::exists(ckpt)) {
      downstream = LoadClassifier(ckpt);
      return;
    }
    ClassifierTrainResult trained = TrainClassifier(augmented, data.validation, ClassifierConfigFor(c));
    SaveClassifier(ckpt, trained.model);
    WriteEpochCsv(rec.directory / "epochs.csv", trained.epochs);
    rec.epochs = std::move(trained.epochs);
    downstream = std::move(trained.model);
  });
  if (opt.until == Stage::kTrainClf) return write_record(), rec;

  run_stage(Stage::kEval, [&] {
    std::optional<std::vector<Sample>> generated;
    std::optional<ClassifierModel> reference;
    if (dm) {
      generated = GenerateEvaluationSet(c, *dm, schedule, ClassCountTable::FromSamples(data.train));
      if (c.fid_features != FeatureSource::kDownstream) reference = TrainReferenceClassifier(c, data);
    }
    const EvaluationOutput ev = Evaluate(c, {&data, &downstream, generated ? &*generated : nullptr,
                                             reference ? &*reference : nullptr});
    rec.report = ev.report;
    WriteTextFile(rec.directory / "report.json", ToJson(rec.report).dump(2) + "\n");
    WriteTextFile(rec.directory / "report.txt", ToText(rec.report));
    if (c.pca && generated) {
      Matrix both(ev.real_features.rows() + ev.generated_features.rows(), ev.real_features.cols());
      both << ev.real_features, ev.generated_features;
      const Matrix xy = Pca2d(both);
      std::ofstream pca(rec.directory / "pca.csv");
      pca.precision(10);
      pca << "source,race,disease,pc1,pc2\n";
      for (Eigen::Index i = 0; i < xy.rows(); ++i) {
        const bool real = i < ev.real_features.rows();
        const Sample& s = real ? data.train[static_cast<std::size_t>(i)]
                               : (*generated)[static_cast<std::size_t>(i - ev.real_features.rows())];
        pca << (real ? "real" : "generated") << "," << RaceName(s.race) << "," << DiseaseCode(s.disease) << ","
            << xy(i, 0) << "," << xy(i, 1) << "\n";
      }
    }
  });
  write_record();
  return rec;
}

}  // namespace fairskin
