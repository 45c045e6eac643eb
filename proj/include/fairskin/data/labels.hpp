// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairskin/numerics/errors.hpp"

namespace fairskin {

enum class Race : int { kAsian = 0, kAfrican = 1, kCaucasian = 2 };
enum class Disease : int {
  kAllergicContactDermatitis = 0,
  kBasalCellCarcinoma = 1,
  kLichenPlanus = 2,
  kPsoriasis = 3,
  kSquamousCellCarcinoma = 4,
};

inline constexpr int kNumRaces = 3;
inline constexpr int kNumDiseases = 5;
inline constexpr int kNumClasses = kNumRaces * kNumDiseases;

inline constexpr std::array<Race, kNumRaces> kAllRaces = {Race::kAsian, Race::kAfrican, Race::kCaucasian};
inline constexpr std::array<Disease, kNumDiseases> kAllDiseases = {
    Disease::kAllergicContactDermatitis, Disease::kBasalCellCarcinoma, Disease::kLichenPlanus,
    Disease::kPsoriasis, Disease::kSquamousCellCarcinoma};

template <typename T>
using RaceArray = std::array<T, kNumRaces>;
template <typename T>
using ClassArray = std::array<T, kNumClasses>;

constexpr int Index(Race r) { return static_cast<int>(r); }
constexpr int Index(Disease d) { return static_cast<int>(d); }

/// Joint (race, disease) condition label in [0, 15).
constexpr int ClassIndex(Race r, Disease d) { return Index(r) * kNumDiseases + Index(d); }
constexpr Race RaceOfClass(int y) { return static_cast<Race>(y / kNumDiseases); }
constexpr Disease DiseaseOfClass(int y) { return static_cast<Disease>(y % kNumDiseases); }

inline std::string_view RaceName(Race r) {
  static constexpr std::array<std::string_view, kNumRaces> kNames = {"asian", "african", "caucasian"};
  return kNames[static_cast<std::size_t>(Index(r))];
}

inline std::string_view DiseaseCode(Disease d) {
  static constexpr std::array<std::string_view, kNumDiseases> kCodes = {"acd", "bcc", "lp", "pso", "scc"};
  return kCodes[static_cast<std::size_t>(Index(d))];
}

inline std::string ClassName(int y) {
  return std::string(RaceName(RaceOfClass(y))) + "/" + std::string(DiseaseCode(DiseaseOfClass(y)));
}

inline std::string ToLower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

inline std::optional<Race> ParseRace(std::string_view s) {
  const std::string l = ToLower(s);
  for (Race r : kAllRaces)
    if (l == RaceName(r)) return r;
  return std::nullopt;
}

inline std::optional<Disease> ParseDisease(std::string_view s) {
  const std::string l = ToLower(s);
  for (Disease d : kAllDiseases)
    if (l == DiseaseCode(d)) return d;
  return std::nullopt;
}

}  // namespace fairskin
