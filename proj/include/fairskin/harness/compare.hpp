// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairskin/harness/config.hpp"
#include "fairskin/harness/svg.hpp"
#include "fairskin/metrics/report.hpp"

namespace fairskin {

/// The parts of a run record that comparison needs.
struct ComparedRun {
  std::string method;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> metric_options;
  MetricsReport report;
};

/// Reads `run.json` from a file path or a run directory.
inline ComparedRun LoadComparedRun(const std::filesystem::path& path) {
  const auto file = std::filesystem::is_directory(path) ? path / "run.json" : path;
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read run record " + file.string());
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    ComparedRun r;
    r.method = j.at("method").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [k, v] : j.at("metric_options").items()) r.metric_options[k] = v.get<std::string>();
    if (!j.contains("report")) throw ConfigError("run record " + file.string() + " has no report (incomplete run)");
    r.report = ReportFromJson(j.at("report"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed run record " + file.string() + ": " + e.what());
  }
}

/// Median; the mean of the two middle values for even counts.
inline std::optional<double> Median(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct ComparisonColumn {
  std::string name;
  std::optional<double> (*get)(const MetricsReport&);
};

inline const std::vector<ComparisonColumn>& ComparisonColumns() {
  static const std::vector<ComparisonColumn> cols = {
      {"fid", [](const MetricsReport& r) { return r.fid_overall; }},
      {"fid_asian", [](const MetricsReport& r) { return r.fid_per_race[0]; }},
      {"fid_african", [](const MetricsReport& r) { return r.fid_per_race[1]; }},
      {"fid_caucasian", [](const MetricsReport& r) { return r.fid_per_race[2]; }},
      {"fid_variance", [](const MetricsReport& r) { return r.fid_variance; }},
      {"dp", [](const MetricsReport& r) { return std::optional<double>(r.dp); }},
      {"essp", [](const MetricsReport& r) { return std::optional<double>(r.essp); }},
      {"is", [](const MetricsReport& r) { return r.is_mean; }},
      {"acc", [](const MetricsReport& r) { return std::optional<double>(r.acc_overall); }},
      {"acc_asian", [](const MetricsReport& r) { return std::optional<double>(r.acc_per_race[0]); }},
      {"acc_african", [](const MetricsReport& r) { return std::optional<double>(r.acc_per_race[1]); }},
      {"acc_caucasian", [](const MetricsReport& r) { return std::optional<double>(r.acc_per_race[2]); }},
  };
  return cols;
}

struct ComparisonRow {
  std::string method;
  int runs = 0;
  /// Per-seed medians, one per ComparisonColumns() entry; absent when no run has the value.
  std::vector<std::optional<double>> values;
};

namespace detail {

inline int MethodRank(const std::string& name) {
  int rank = 0;
  for (const auto& e : kMethodNames) {
    if (name == e.name) return rank;
    ++rank;
  }
  return rank;
}

}  // namespace detail

/// One row per method holding per-column medians across its runs.
inline std::vector<ComparisonRow> Compare(const std::vector<ComparedRun>& runs) {
  if (runs.size() < 2) throw ConfigError("compare needs at least two run records");
  for (const auto& r : runs)
    if (r.metric_options != runs.front().metric_options)
      throw IncompatibleMetricsError("run " + r.method + "/seed " + std::to_string(r.seed) +
                                     " was evaluated with different metric options");
  std::vector<std::string> methods;
  for (const auto& r : runs)
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
  std::stable_sort(methods.begin(), methods.end(), [](const std::string& a, const std::string& b) {
    const int ra = detail::MethodRank(a), rb = detail::MethodRank(b);
    return ra != rb ? ra < rb : a < b;
  });
  std::vector<ComparisonRow> rows;
  for (const auto& m : methods) {
    ComparisonRow row{m, 0, {}};
    for (const auto& col : ComparisonColumns()) {
      std::vector<double> vals;
      for (const auto& r : runs)
        if (r.method == m)
          if (const auto v = col.get(r.report)) vals.push_back(*v);
      row.values.push_back(Median(vals));
    }
    for (const auto& r : runs) row.runs += r.method == m ? 1 : 0;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string ComparisonCsv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << "method,runs";
  for (const auto& c : ComparisonColumns()) out << "," << c.name;
  out << "\n";
  for (const auto& r : rows) {
    out << r.method << "," << r.runs;
    for (const auto& v : r.values) out << "," << (v ? detail::FormatReal(*v) : "");
    out << "\n";
  }
  return out.str();
}

inline std::string ComparisonText(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-12s %4s", "method", "runs");
  out << buf;
  for (const auto& c : ComparisonColumns()) {
    std::snprintf(buf, sizeof buf, " %13s", c.name.c_str());
    out << buf;
  }
  out << "\n";
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-12s %4d", r.method.c_str(), r.runs);
    out << buf;
    for (const auto& v : r.values) {
      std::snprintf(buf, sizeof buf, " %13s", detail::FormatOptional(v, "%.3f").c_str());
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

/// Bar chart of the fairness columns, one bar group per metric.
inline std::string ComparisonSvg(const std::vector<ComparisonRow>& rows) {
  const std::vector<std::string> shown = {"fid_variance", "dp", "essp", "acc"};
  std::vector<SvgSeries> series;
  for (const auto& r : rows) {
    SvgSeries s{r.method, {}};
    for (const auto& name : shown)
      for (std::size_t c = 0; c < ComparisonColumns().size(); ++c)
        if (ComparisonColumns()[c].name == name) s.values.push_back(r.values[c]);
    series.push_back(std::move(s));
  }
  return SvgBarChart("Per-method medians", shown, series);
}

}  // namespace fairskin
