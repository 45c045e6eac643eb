// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fairskin/data/labels.hpp"
#include "fairskin/data/pgm.hpp"
#include "fairskin/data/sample.hpp"

namespace fairskin {

namespace detail {

inline std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(Trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

/// Loads samples listed in a `file,race,disease` manifest. Image paths are
/// relative to `image_dir`. All bad rows are collected before throwing.
inline std::vector<Sample> IngestExternal(const std::filesystem::path& manifest_path,
                                          const std::filesystem::path& image_dir, int height = 16,
                                          int width = 16) {
  std::ifstream in(manifest_path);
  if (!in) throw IngestionError({"manifest: cannot open " + manifest_path.string()});
  std::string line;
  if (!std::getline(in, line) || ToLower(detail::Trim(line)) != "file,race,disease") {
    throw IngestionError({"manifest: header must be 'file,race,disease'"});
  }
  std::vector<Sample> out;
  std::vector<std::string> errors;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (detail::Trim(line).empty()) continue;
    const auto fields = detail::SplitCsvLine(line);
    const std::string where = "row " + std::to_string(row);
    if (fields.size() != 3) {
      errors.push_back(where + ": expected 3 fields");
      continue;
    }
    const auto race = ParseRace(fields[1]);
    const auto disease = ParseDisease(fields[2]);
    std::string problem;
    if (!race) problem += "unknown race '" + fields[1] + "'; ";
    if (!disease) problem += "unknown disease '" + fields[2] + "'; ";
    const auto path = image_dir / fields[0];
    Image img;
    if (!std::filesystem::exists(path)) {
      problem += "missing file " + path.string() + "; ";
    } else {
      try {
        img = ToUnitImage(ReadPgm(path), height, width);
      } catch (const Error& e) {
        problem += std::string("unreadable image: ") + e.what() + "; ";
      }
    }
    if (!problem.empty()) {
      problem.resize(problem.size() - 2);
      errors.push_back(where + " (" + fields[0] + "): " + problem);
      continue;
    }
    out.push_back(Sample{std::move(img), *race, *disease, Origin::kReal});
  }
  if (!errors.empty()) throw IngestionError(std::move(errors));
  return out;
}

/// Writes samples as PGM files plus a manifest. File names are `<prefix><i>.pgm`.
inline void ExportSamples(const std::vector<Sample>& samples, const std::filesystem::path& dir,
                          const std::string& prefix = "img_") {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / "manifest.csv");
  manifest << "file,race,disease\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::string name = prefix + std::to_string(i) + ".pgm";
    WritePgm(dir / name, samples[i].image);
    manifest << name << "," << RaceName(samples[i].race) << "," << DiseaseCode(samples[i].disease) << "\n";
  }
}

}  // namespace fairskin
