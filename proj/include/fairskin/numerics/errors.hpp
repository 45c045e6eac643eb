// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fairskin {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called with arguments violating its contract.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A numeric routine failed (non-convergence, non-finite values, not PSD).
class NumericError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class EmptyCorpusError : public Error {
 public:
  using Error::Error;
};

class MissingWeightError : public Error {
 public:
  using Error::Error;
};

class MissingGroupError : public Error {
 public:
  using Error::Error;
};

/// Raised by ingestion; carries one message per offending manifest row.
class IngestionError : public Error {
 public:
  explicit IngestionError(std::vector<std::string> rows)
      : Error(Join(rows)), rows_(std::move(rows)) {}

  const std::vector<std::string>& rows() const { return rows_; }

 private:
  static std::string Join(const std::vector<std::string>& rows) {
    std::string out = "ingestion failed for " + std::to_string(rows.size()) + " row(s):";
    for (const auto& r : rows) out += "\n  " + r;
    return out;
  }
  std::vector<std::string> rows_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IncompatibleMetricsError : public Error {
 public:
  using Error::Error;
};

/// Wraps an error raised inside one pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace fairskin
