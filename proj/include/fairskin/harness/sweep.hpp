// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fairskin/harness/compare.hpp"
#include "fairskin/harness/pipeline.hpp"

namespace fairskin {

/// `aug_size` values are generated images per class (M = 15 * value);
/// `proportions` values are African:Asian:Caucasian shares.
enum class SweepAxis { kAugSize, kProportions };

inline SweepAxis ParseSweepAxis(const std::string& text) {
  const std::string lower = ToLower(text);
  if (lower == "aug_size" || lower == "size") return SweepAxis::kAugSize;
  if (lower == "proportions") return SweepAxis::kProportions;
  throw ConfigError("sweep axis must be aug_size or proportions, got '" + text + "'");
}

/// The config of one sweep cell.
inline ExperimentConfig SweepCell(const ExperimentConfig& base, SweepAxis axis, const std::string& value) {
  ExperimentConfig c = base;
  if (axis == SweepAxis::kAugSize) {
    const int per_class = detail::ParseNumber<int>("sweep value", detail::Trim(value));
    if (per_class < 0) throw ConfigError("sweep value: images per class must be non-negative");
    c.aug_total = kNumClasses * per_class;
  } else {
    ParseRaceProportions(value);
    c.aug_plan = AugPlanKind::kProportions;
    c.aug_proportions = detail::Trim(value);
  }
  ValidateConfig(c);
  return c;
}

struct SweepRow {
  std::string value;
  RunRecord record;
};

/// One experiment per value, in order. `progress` is called after each run.
inline std::vector<SweepRow> RunSweep(const ExperimentConfig& base, SweepAxis axis, const std::vector<std::string>& values,
                                      const std::function<void(const SweepRow&)>& progress = {}) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::vector<ExperimentConfig> cells;
  for (const auto& v : values) cells.push_back(SweepCell(base, axis, v));
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    rows.push_back({detail::Trim(values[i]), RunExperiment(cells[i])});
    if (progress) progress(rows.back());
  }
  return rows;
}

inline std::string SweepCsv(SweepAxis axis, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << (axis == SweepAxis::kAugSize ? "per_class" : "proportions") << ",aug_total,config_hash";
  for (const auto& c : ComparisonColumns()) out << "," << c.name;
  out << "\n";
  for (const auto& r : rows) {
    out << r.value << "," << r.record.config.aug_total << "," << r.record.config_hash;
    for (const auto& c : ComparisonColumns()) {
      const auto v = c.get(r.record.report);
      out << "," << (v ? detail::FormatReal(*v) : "");
    }
    out << "\n";
  }
  return out.str();
}

inline std::string SweepSvg(SweepAxis axis, const std::vector<SweepRow>& rows) {
  std::vector<std::string> xs;
  for (const auto& r : rows) xs.push_back(r.value);
  std::vector<SvgSeries> series;
  for (const char* name : {"acc", "dp", "essp"}) {
    SvgSeries s{name, {}};
    for (const auto& c : ComparisonColumns())
      if (c.name == name)
        for (const auto& r : rows) s.values.push_back(c.get(r.record.report));
    series.push_back(std::move(s));
  }
  return SvgLineChart(axis == SweepAxis::kAugSize ? "Metrics vs generated images per class"
                                                  : "Metrics vs race proportions",
                      xs, series);
}

}  // namespace fairskin
