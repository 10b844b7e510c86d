#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nliaudit/bias.hpp"
#include "nliaudit/corpus.hpp"
#include "nliaudit/lexical.hpp"
#include "nliaudit/protorole.hpp"
#include "nliaudit/stats.hpp"

namespace nliaudit {

enum class ReportFormat : std::uint8_t { kJson, kTsv, kMarkdown };

std::optional<ReportFormat> parse_report_format(std::string_view name);
std::string_view to_string(ReportFormat f);

struct SplitConfig {
  std::filesystem::path path;
  std::optional<SplitFormat> format;  // auto-detected from the file when unset
};

struct AuditConfig {
  std::optional<SplitConfig> train;  // required by run_audit
  std::optional<SplitConfig> dev;
  std::optional<SplitConfig> test;

  std::optional<std::filesystem::path> rules_file;  // built-in table when unset
  bool prefer_metadata = false;

  double alpha = 0.05;
  int top_k = 10;
  std::int64_t min_freq = 5;
  CountingMode counting = CountingMode::kPresence;
  std::optional<std::filesystem::path> stop_list;

  // Give-away flagging policy (not part of the analysis proper; both
  // thresholds are tool policy, labeled as such in the report).
  double role_flag_threshold = 0.85;
  double word_flag_threshold = 0.70;

  // Manifest checks: per-split expected counts, plus a switch that fills the
  // published official counts for splits named train/dev/test.
  std::map<std::string, ManifestExpectation> expectations;
  bool official_manifest = false;

  ReportFormat format = ReportFormat::kJson;
  std::optional<std::filesystem::path> output;  // stdout when unset

  void validate() const;  // ConfigError on out-of-range values
};

struct SplitAudit {
  std::string name;
  SplitKind kind = SplitKind::kCustom;
  LabelCounts counts;
  std::int64_t malformed_lines = 0;
  ManifestReport manifest;

  std::int64_t matched = 0;
  std::int64_t unmatched = 0;
  std::int64_t unknown_metadata = 0;
  std::array<std::int64_t, kProtoRoleCount> role_counts{};

  ChiSquareResult chi;
  BiasSummary bias;
  // Share of each role's records carrying the trained model's label; equals
  // maj_pr on the training split, may dip below 0.5 elsewhere.
  std::array<std::optional<double>, kProtoRoleCount> per_role_prbm{};

  std::vector<LexicalEntry> top_entailed;
  std::vector<LexicalEntry> top_not_entailed;

  // Give-away features: roles with maj_pr >= role threshold, words with
  // max_l P(l|w) >= word threshold and total_freq >= min_freq.
  std::vector<ProtoRoleBiasEntry> flagged_roles;
  std::vector<LexicalEntry> flagged_words;
};

struct AuditReport {
  std::string tool_name;
  std::string tool_version;
  int schema_version = 0;
  AuditConfig config;  // echoed so every number is reproducible
  std::vector<SplitAudit> splits;  // train, then dev/test when configured
  PrbmModel prbm;
  std::vector<std::string> warnings;
};

// Full pipeline: load -> validate manifest -> tag -> chi-square -> bias ->
// lexical -> assemble. Deterministic for fixed config and inputs; any module
// error propagates with the failing stage named.
AuditReport run_audit(const AuditConfig& config);

// Stable machine/human emission. JSON keys are sorted and display fields are
// rounded to 4 decimals with full-precision values kept under "raw"; the
// same report always renders to identical bytes.
std::string render(const AuditReport& report, ReportFormat format);
void emit(const AuditReport& report, ReportFormat format, std::ostream& out);
void emit_to_file(const AuditReport& report, ReportFormat format,
                  const std::filesystem::path& path);

}  // namespace nliaudit
