#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace nliaudit {

// Base error for every failure surfaced by the library. `stage()` names the
// pipeline stage that failed ("corpus", "protorole", "stats", "bias",
// "lexical", "synth", "fetch", "report") so callers can report where an audit
// broke without parsing message text.
class AuditError : public std::runtime_error {
 public:
  AuditError(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

// Bad flags, unparseable config, invalid thresholds. CLI exit code 1.
class ConfigError : public AuditError {
 public:
  using AuditError::AuditError;
};

// Unreadable or malformed input data, unknown labels, empty splits. Exit code 2.
class DataError : public AuditError {
 public:
  using AuditError::AuditError;
};

// Numeric domain violations (non-finite statistic, degenerate table). Exit code 3.
class NumericError : public AuditError {
 public:
  using AuditError::AuditError;
};

}  // namespace nliaudit
