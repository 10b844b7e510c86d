#pragma once

#include <string_view>

namespace nliaudit {

inline constexpr std::string_view kToolName = "nliaudit";
inline constexpr std::string_view kToolVersion = "0.1.0";

// Version of the machine-readable report layout, bumped on any
// backwards-incompatible change to the JSON schema (see docs/report_schema.md).
inline constexpr int kReportSchemaVersion = 1;

}  // namespace nliaudit
