// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fairskin/classifier/train.hpp"
#include "fairskin/data/ingest.hpp"
#include "fairskin/diffusion/schedule.hpp"
#include "fairskin/diffusion/trainer.hpp"
#include "fairskin/numerics/rng.hpp"
#include "fairskin/resampling/weights.hpp"

namespace fairskin {

enum class Method { kNone, kVanilla, kCbrs, kSqrs, kCbdm, kFairSkinC, kFairSkinS };
enum class AugPlanKind { kAuto, kNone, kUniform, kProportions, kBalance };
enum class FeatureSource { kReference, kDownstream, kRandom };
enum class FidGrouping { kRace, kSubcategory };

/// Which mechanisms a method switches on.
struct MethodMechanism {
  bool trains_dm = true;
  WeightScheme scheme = WeightScheme::kUniform;
  bool uses_gamma = false;
  /// Imbalance-aware augmentation and dynamic reweighting.
  bool level3 = false;
};

inline MethodMechanism MechanismOf(Method m) {
  switch (m) {
    case Method::kNone: return {false, WeightScheme::kUniform, false, false};
    case Method::kVanilla: return {true, WeightScheme::kUniform, false, false};
    case Method::kCbrs: return {true, WeightScheme::kCbrs, false, false};
    case Method::kSqrs: return {true, WeightScheme::kSqrs, false, false};
    case Method::kCbdm: return {true, WeightScheme::kUniform, true, false};
    case Method::kFairSkinC: return {true, WeightScheme::kCbrs, true, true};
    case Method::kFairSkinS: return {true, WeightScheme::kSqrs, true, true};
  }
  return {};
}

struct ExperimentConfig {
  std::uint64_t seed = 1;
  Method method = Method::kFairSkinC;

  // Data.
  std::string profile = "default";
  std::string manifest;
  std::string image_dir;
  int height = 16;
  int width = 16;
  double pixel_noise = 0.03;
  double position_jitter = 0.25;

  // Diffusion model.
  int dm_steps = 20000;
  int dm_batch = 32;
  double dm_lr = 1e-3;
  int dm_hidden = 256;
  int timesteps = 100;
  ScheduleKind schedule = ScheduleKind::kScaledLinear;
  PreconditionerKind preconditioner = PreconditionerKind::kGaussian;
  // Larger values (0.01 and up) erase class conditioning on the toy corpus.
  double gamma = 0.001;
  bool stop_gradient = false;
  WeightMode weight_mode = WeightMode::kSample;

  // Augmentation.
  AugPlanKind aug_plan = AugPlanKind::kAuto;
  int aug_total = 1500;
  /// African:Asian:Caucasian.
  std::string aug_proportions = "0.3:0.2:0.5";

  // Classifier.
  ReweightMode reweight_mode = ReweightMode::kLoss;
  int clf_epochs = 10;
  int clf_batch = 64;
  double clf_lr = 1e-3;

  // Metrics.
  FeatureSource fid_features = FeatureSource::kReference;
  FidGrouping fid_grouping = FidGrouping::kRace;
  int is_splits = 10;
  /// Generated evaluation images, spread like the training class counts.
  int eval_total = 1500;
  bool export_samples = true;
  bool pca = false;

  /// Output root; not part of the config hash.
  std::string out;
};

namespace detail {

template <typename E>
struct EnumName {
  E value;
  const char* name;
};

inline constexpr EnumName<Method> kMethodNames[] = {
    {Method::kNone, "none"},       {Method::kVanilla, "vanilla"},        {Method::kCbrs, "cbrs"},
    {Method::kSqrs, "sqrs"},       {Method::kCbdm, "cbdm"},              {Method::kFairSkinC, "fairskin-c"},
    {Method::kFairSkinS, "fairskin-s"}};
inline constexpr EnumName<ScheduleKind> kScheduleNames[] = {{ScheduleKind::kScaledLinear, "scaled-linear"},
                                                            {ScheduleKind::kLinear, "linear"}};
inline constexpr EnumName<PreconditionerKind> kPreconditionerNames[] = {
    {PreconditionerKind::kGaussian, "gaussian"}, {PreconditionerKind::kIsotropic, "isotropic"},
    {PreconditionerKind::kNone, "none"}};
inline constexpr EnumName<WeightMode> kWeightModeNames[] = {{WeightMode::kSample, "sample"}, {WeightMode::kLoss, "loss"}};
inline constexpr EnumName<AugPlanKind> kAugPlanNames[] = {{AugPlanKind::kAuto, "auto"},
                                                          {AugPlanKind::kNone, "none"},
                                                          {AugPlanKind::kUniform, "uniform"},
                                                          {AugPlanKind::kProportions, "proportions"},
                                                          {AugPlanKind::kBalance, "balance"}};
inline constexpr EnumName<ReweightMode> kReweightNames[] = {
    {ReweightMode::kLoss, "loss"}, {ReweightMode::kResample, "resample"}, {ReweightMode::kOff, "off"}};
inline constexpr EnumName<FeatureSource> kFeatureNames[] = {{FeatureSource::kReference, "reference"},
                                                            {FeatureSource::kDownstream, "downstream"},
                                                            {FeatureSource::kRandom, "random"}};
inline constexpr EnumName<FidGrouping> kGroupingNames[] = {{FidGrouping::kRace, "race"},
                                                           {FidGrouping::kSubcategory, "subcategory"}};

template <typename E, std::size_t N>
std::string NameOf(const EnumName<E> (&table)[N], E v) {
  for (const auto& e : table)
    if (e.value == v) return e.name;
  return "?";
}

template <typename E, std::size_t N>
E ParseEnum(const EnumName<E> (&table)[N], const std::string& key, const std::string& text) {
  const std::string lower = ToLower(text);
  std::string options;
  for (const auto& e : table) {
    if (lower == e.name) return e.value;
    options += (options.empty() ? "" : ", ") + std::string(e.name);
  }
  throw ConfigError(key + ": '" + text + "' is not one of " + options);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) throw ConfigError(key + ": '" + text + "' is not a valid number");
  return v;
}

inline bool ParseBool(const std::string& key, const std::string& text) {
  const std::string lower = ToLower(text);
  if (lower == "true" || lower == "1" || lower == "yes" || lower == "on") return true;
  if (lower == "false" || lower == "0" || lower == "no" || lower == "off") return false;
  throw ConfigError(key + ": '" + text + "' is not a boolean");
}

inline std::string FormatReal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string MethodName(Method m) { return detail::NameOf(detail::kMethodNames, m); }
inline std::string ReweightModeName(ReweightMode m) { return detail::NameOf(detail::kReweightNames, m); }

/// One settable config key.
struct ConfigField {
  std::string name;
  std::string help;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

inline const std::vector<ConfigField>& ConfigFields() {
  using namespace detail;
  static const std::vector<ConfigField> fields = [] {
    std::vector<ConfigField> f;
#define FAIRSKIN_INT_FIELD(key, member, type, help)                                                  \
  f.push_back({key, help, [](const ExperimentConfig& c) { return std::to_string(c.member); },       \
               [](ExperimentConfig& c, const std::string& v) { c.member = ParseNumber<type>(key, v); }})
#define FAIRSKIN_REAL_FIELD(key, member, help)                                                      \
  f.push_back({key, help, [](const ExperimentConfig& c) { return FormatReal(c.member); },         \
               [](ExperimentConfig& c, const std::string& v) { c.member = ParseNumber<double>(key, v); }})
#define FAIRSKIN_BOOL_FIELD(key, member, help)                                                      \
  f.push_back({key, help, [](const ExperimentConfig& c) { return std::string(c.member ? "true" : "false"); }, \
               [](ExperimentConfig& c, const std::string& v) { c.member = ParseBool(key, v); }})
#define FAIRSKIN_TEXT_FIELD(key, member, help)                                                      \
  f.push_back({key, help, [](const ExperimentConfig& c) { return c.member; },                     \
               [](ExperimentConfig& c, const std::string& v) { c.member = v; }})
#define FAIRSKIN_ENUM_FIELD(key, member, table, help)                                               \
  f.push_back({key, help, [](const ExperimentConfig& c) { return NameOf(table, c.member); },      \
               [](ExperimentConfig& c, const std::string& v) { c.member = ParseEnum(table, key, v); }})

    FAIRSKIN_INT_FIELD("seed", seed, std::uint64_t, "root seed");
    FAIRSKIN_ENUM_FIELD("method", method, kMethodNames, "none|vanilla|cbrs|sqrs|cbdm|fairskin-c|fairskin-s");
    FAIRSKIN_TEXT_FIELD("profile", profile, "'default' or 15 comma-separated class counts (asian, african, caucasian rows)");
    FAIRSKIN_TEXT_FIELD("manifest", manifest, "external manifest (file,race,disease); overrides profile");
    FAIRSKIN_TEXT_FIELD("image_dir", image_dir, "directory of the manifest images");
    FAIRSKIN_INT_FIELD("height", height, int, "image height");
    FAIRSKIN_INT_FIELD("width", width, int, "image width");
    FAIRSKIN_REAL_FIELD("pixel_noise", pixel_noise, "synthetic per-pixel noise sd");
    FAIRSKIN_REAL_FIELD("position_jitter", position_jitter, "fraction of the frame the lesion centre may move over");
    FAIRSKIN_INT_FIELD("dm_steps", dm_steps, int, "diffusion training steps");
    FAIRSKIN_INT_FIELD("dm_batch", dm_batch, int, "diffusion batch size");
    FAIRSKIN_REAL_FIELD("dm_lr", dm_lr, "diffusion learning rate");
    FAIRSKIN_INT_FIELD("dm_hidden", dm_hidden, int, "denoiser hidden width");
    FAIRSKIN_INT_FIELD("timesteps", timesteps, int, "diffusion steps T");
    FAIRSKIN_ENUM_FIELD("schedule", schedule, kScheduleNames, "scaled-linear|linear");
    FAIRSKIN_ENUM_FIELD("preconditioner", preconditioner, kPreconditionerNames, "gaussian|isotropic|none");
    FAIRSKIN_REAL_FIELD("gamma", gamma, "class-diversity weight for methods that use it");
    FAIRSKIN_BOOL_FIELD("stop_gradient", stop_gradient, "detach the other-label branch of L_r");
    FAIRSKIN_ENUM_FIELD("weight_mode", weight_mode, kWeightModeNames, "sample|loss");
    FAIRSKIN_ENUM_FIELD("aug_plan", aug_plan, kAugPlanNames, "auto|none|uniform|proportions|balance");
    FAIRSKIN_INT_FIELD("aug_total", aug_total, int, "number of generated training images M");
    FAIRSKIN_TEXT_FIELD("aug_proportions", aug_proportions, "African:Asian:Caucasian shares");
    FAIRSKIN_ENUM_FIELD("reweight_mode", reweight_mode, kReweightNames, "loss|resample|off (fairskin methods)");
    FAIRSKIN_INT_FIELD("clf_epochs", clf_epochs, int, "classifier epochs");
    FAIRSKIN_INT_FIELD("clf_batch", clf_batch, int, "classifier batch size");
    FAIRSKIN_REAL_FIELD("clf_lr", clf_lr, "classifier learning rate");
    FAIRSKIN_ENUM_FIELD("fid_features", fid_features, kFeatureNames, "reference|downstream|random");
    FAIRSKIN_ENUM_FIELD("fid_grouping", fid_grouping, kGroupingNames, "race|subcategory");
    FAIRSKIN_INT_FIELD("is_splits", is_splits, int, "inception-style score splits");
    FAIRSKIN_INT_FIELD("eval_total", eval_total, int, "generated images for FID and IS, spread like the training classes");
    FAIRSKIN_BOOL_FIELD("export_samples", export_samples, "write generated images as PGM");
    FAIRSKIN_BOOL_FIELD("pca", pca, "write 2-D PCA coordinates of eval features");
    FAIRSKIN_TEXT_FIELD("out", out, "output root (default $FAIRSKIN_OUT or ./runs)");
#undef FAIRSKIN_INT_FIELD
#undef FAIRSKIN_REAL_FIELD
#undef FAIRSKIN_BOOL_FIELD
#undef FAIRSKIN_TEXT_FIELD
#undef FAIRSKIN_ENUM_FIELD
    return f;
  }();
  return fields;
}

/// Metric options that must agree for two reports to be comparable.
inline const std::vector<std::string>& MetricOptionKeys() {
  static const std::vector<std::string> keys = {"fid_features", "fid_grouping", "is_splits", "eval_total"};
  return keys;
}

inline void SetConfigValue(ExperimentConfig& c, const std::string& key, const std::string& value) {
  for (const auto& f : ConfigFields())
    if (f.name == key) return f.set(c, value);
  throw ConfigError("unknown config key '" + key + "'");
}

inline std::string GetConfigValue(const ExperimentConfig& c, const std::string& key) {
  for (const auto& f : ConfigFields())
    if (f.name == key) return f.get(c);
  throw ConfigError("unknown config key '" + key + "'");
}

/// Applies `key = value` lines; '#' starts a comment.
inline void ApplyConfigText(ExperimentConfig& c, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
    SetConfigValue(c, detail::Trim(line.substr(0, eq)), detail::Trim(line.substr(eq + 1)));
  }
}

inline ExperimentConfig LoadConfigFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentConfig c;
  ApplyConfigText(c, ss.str());
  return c;
}

/// Sorted `key = value` lines of every key except `out`.
inline std::string CanonicalConfig(const ExperimentConfig& c) {
  std::map<std::string, std::string> kv;
  for (const auto& f : ConfigFields())
    if (f.name != "out") kv[f.name] = f.get(c);
  std::string text;
  for (const auto& [k, v] : kv) text += k + " = " + v + "\n";
  return text;
}

inline std::string ConfigHash(const ExperimentConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(detail::Fnv1a64(CanonicalConfig(c))));
  return buf;
}

/// Parses "a:b:c" race shares in African:Asian:Caucasian order.
inline RaceArray<double> ParseRaceProportions(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ':')) parts.push_back(detail::ParseNumber<double>("aug_proportions", detail::Trim(piece)));
  if (parts.size() != 3) throw ConfigError("aug_proportions: expected African:Asian:Caucasian");
  RaceArray<double> w{};
  w[static_cast<std::size_t>(Index(Race::kAfrican))] = parts[0];
  w[static_cast<std::size_t>(Index(Race::kAsian))] = parts[1];
  w[static_cast<std::size_t>(Index(Race::kCaucasian))] = parts[2];
  for (double v : w)
    if (!(v >= 0.0)) throw ConfigError("aug_proportions: shares must be non-negative");
  if (w[0] + w[1] + w[2] <= 0.0) throw ConfigError("aug_proportions: shares sum to zero");
  return w;
}

/// 'default' or 15 comma-separated counts, row by row (asian, african, caucasian).
inline ClassCountTable ParseProfile(const std::string& text) {
  if (ToLower(text) == "default") return DefaultCountProfile();
  const auto parts = detail::SplitCsvLine(text);
  if (parts.size() != static_cast<std::size_t>(kNumClasses)) throw ConfigError("profile: expected 15 counts");
  ClassCountTable t;
  for (int y = 0; y < kNumClasses; ++y) {
    const int n = detail::ParseNumber<int>("profile", parts[static_cast<std::size_t>(y)]);
    if (n < 0) throw ConfigError("profile: counts must be non-negative");
    t.set(y, n);
  }
  return t;
}

/// Range checks that do not need data.
inline void ValidateConfig(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(c.height >= 8 && c.height <= 32 && c.width >= 8 && c.width <= 32, "height and width must lie in [8, 32]");
  require(c.pixel_noise >= 0.0, "pixel_noise must be non-negative");
  require(c.position_jitter >= 0.0 && c.position_jitter <= 1.0, "position_jitter must lie in [0, 1]");
  require(c.dm_steps > 0, "dm_steps must be positive");
  require(c.dm_batch > 0, "dm_batch must be positive");
  require(c.dm_lr > 0.0, "dm_lr must be positive");
  require(c.dm_hidden > 0, "dm_hidden must be positive");
  require(c.timesteps >= 1, "timesteps must be at least 1");
  require(c.gamma >= 0.0, "gamma must be non-negative");
  require(c.aug_total >= 0, "aug_total must be non-negative");
  require(c.clf_epochs > 0 && c.clf_batch > 0 && c.clf_lr > 0.0, "classifier epochs, batch and lr must be positive");
  require(c.is_splits >= 1, "is_splits must be positive");
  require(c.eval_total >= 1, "eval_total must be positive");
  require(c.manifest.empty() == c.image_dir.empty() || !c.manifest.empty(), "image_dir requires manifest");
  ParseRaceProportions(c.aug_proportions);
  if (c.manifest.empty()) ParseProfile(c.profile);
}

}  // namespace fairskin
