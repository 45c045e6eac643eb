// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "fairskin/data/labels.hpp"
#include "fairskin/numerics/errors.hpp"

namespace fairskin {

/// Evaluation summary of one run. Generation metrics are absent when no
/// images were generated. Accuracies and DP are in percentage points.
struct MetricsReport {
  std::optional<double> fid_overall;
  RaceArray<std::optional<double>> fid_per_race{};
  std::optional<double> fid_variance;
  std::optional<double> is_mean;
  std::optional<double> is_std;
  double dp = 0.0;
  double essp = 0.0;
  double acc_overall = 0.0;
  RaceArray<double> acc_per_race{};

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

namespace detail {

inline nlohmann::json OptionalJson(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

inline std::optional<double> OptionalFrom(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace detail

inline nlohmann::ordered_json ToJson(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["fid_overall"] = detail::OptionalJson(r.fid_overall);
  nlohmann::ordered_json per_race = nlohmann::ordered_json::object();
  for (Race race : kAllRaces)
    per_race[std::string(RaceName(race))] = detail::OptionalJson(r.fid_per_race[static_cast<std::size_t>(Index(race))]);
  j["fid_per_race"] = per_race;
  j["fid_variance"] = detail::OptionalJson(r.fid_variance);
  j["is_mean"] = detail::OptionalJson(r.is_mean);
  j["is_std"] = detail::OptionalJson(r.is_std);
  j["dp"] = r.dp;
  j["essp"] = r.essp;
  j["acc_overall"] = r.acc_overall;
  nlohmann::ordered_json acc = nlohmann::ordered_json::object();
  for (Race race : kAllRaces) acc[std::string(RaceName(race))] = r.acc_per_race[static_cast<std::size_t>(Index(race))];
  j["acc_per_race"] = acc;
  return j;
}

inline MetricsReport ReportFromJson(const nlohmann::json& j) {
  try {
    MetricsReport r;
    r.fid_overall = detail::OptionalFrom(j.at("fid_overall"));
    for (Race race : kAllRaces)
      r.fid_per_race[static_cast<std::size_t>(Index(race))] =
          detail::OptionalFrom(j.at("fid_per_race").at(std::string(RaceName(race))));
    r.fid_variance = detail::OptionalFrom(j.at("fid_variance"));
    r.is_mean = detail::OptionalFrom(j.at("is_mean"));
    r.is_std = detail::OptionalFrom(j.at("is_std"));
    r.dp = j.at("dp").get<double>();
    r.essp = j.at("essp").get<double>();
    r.acc_overall = j.at("acc_overall").get<double>();
    for (Race race : kAllRaces)
      r.acc_per_race[static_cast<std::size_t>(Index(race))] = j.at("acc_per_race").at(std::string(RaceName(race))).get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("malformed metrics report: ") + e.what());
  }
}

namespace detail {

inline std::string FormatOptional(const std::optional<double>& v, const char* fmt = "%.4f") {
  if (!v) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, *v);
  return buf;
}

}  // namespace detail

/// Two aligned columns, one field per line.
inline std::string ToText(const MetricsReport& r) {
  std::ostringstream out;
  auto line = [&](const std::string& key, const std::string& value) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-26s %s\n", key.c_str(), value.c_str());
    out << buf;
  };
  line("fid_overall", detail::FormatOptional(r.fid_overall));
  for (Race race : kAllRaces)
    line("fid_per_race." + std::string(RaceName(race)),
         detail::FormatOptional(r.fid_per_race[static_cast<std::size_t>(Index(race))]));
  line("fid_variance", detail::FormatOptional(r.fid_variance));
  line("is_mean", detail::FormatOptional(r.is_mean));
  line("is_std", detail::FormatOptional(r.is_std));
  line("dp", detail::FormatOptional(r.dp));
  line("essp", detail::FormatOptional(r.essp));
  line("acc_overall", detail::FormatOptional(r.acc_overall));
  for (Race race : kAllRaces)
    line("acc_per_race." + std::string(RaceName(race)),
         detail::FormatOptional(r.acc_per_race[static_cast<std::size_t>(Index(race))]));
  return out.str();
}

}  // namespace fairskin
