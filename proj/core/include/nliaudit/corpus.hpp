#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nliaudit {

// The dataset is strictly two-way: every record is entailed or not-entailed.
// Any other label string on ingestion is an error, never a third class.
enum class Label : std::uint8_t { kEntailed = 0, kNotEntailed = 1 };

inline constexpr std::size_t kLabelCount = 2;

constexpr std::size_t label_index(Label l) { return static_cast<std::size_t>(l); }

constexpr Label other_label(Label l) {
  return l == Label::kEntailed ? Label::kNotEntailed : Label::kEntailed;
}

std::string_view to_string(Label l);  // "entailed" / "not-entailed"

// Case-insensitive match after trimming; accepts the hyphenation variants
// seen in published archives ("not-entailed", "not_entailed", "non-entailed").
std::optional<Label> parse_label(std::string_view raw);

struct NliRecord {
  std::string premise;     // may be empty; retained for provenance only
  std::string hypothesis;  // non-empty after whitespace trimming
  Label label = Label::kNotEntailed;
  // Explicit role annotation carried by some source formats (JSON-lines
  // field "proto_role"); consumed by tagging when prefer_metadata is set.
  std::optional<std::string> proto_role_meta;

  bool operator==(const NliRecord&) const = default;
};

enum class SplitKind : std::uint8_t { kTrain, kDev, kTest, kCustom };

SplitKind split_kind_from_name(std::string_view name);
std::string_view to_string(SplitKind kind);

struct LabelCounts {
  std::int64_t entailed = 0;
  std::int64_t not_entailed = 0;

  std::int64_t total() const { return entailed + not_entailed; }
  std::int64_t of(Label l) const {
    return l == Label::kEntailed ? entailed : not_entailed;
  }
  bool operator==(const LabelCounts&) const = default;
};

struct DatasetSplit {
  std::string name;  // "train", "dev", "test", or a custom name
  SplitKind kind = SplitKind::kCustom;
  std::vector<NliRecord> records;  // input order preserved
  std::int64_t malformed_lines = 0;

  std::size_t size() const { return records.size(); }
  LabelCounts label_counts() const;
};

enum class SplitFormat : std::uint8_t { kTsv, kJsonLines };

std::optional<SplitFormat> parse_format(std::string_view name);  // "tsv" / "jsonl"
std::string_view to_string(SplitFormat f);

// .tsv/.tab -> TSV, .jsonl/.json -> JSON-lines; anything else sniffs the
// first non-space byte ('{' means JSON-lines).
SplitFormat detect_format(const std::filesystem::path& path);

// Reads one record per well-formed line, preserving order. Malformed lines
// (wrong TSV field count, unparseable JSON, empty hypothesis) are skipped and
// counted. A parseable line carrying an unknown label string is a DataError
// that names the line number, as is an input with zero well-formed records.
DatasetSplit load_split(const std::filesystem::path& path, SplitFormat format,
                        std::string_view name);
DatasetSplit load_split_from(std::istream& in, SplitFormat format,
                             std::string_view name, std::string_view source = "<stream>");

// Inverse of load_split. TSV emits exactly premise<TAB>hypothesis<TAB>label
// and cannot carry proto_role_meta; fields containing tabs or newlines are a
// DataError in TSV mode. JSON-lines round-trips every field.
void save_split(const DatasetSplit& split, const std::filesystem::path& path,
                SplitFormat format);
void save_split_to(const DatasetSplit& split, std::ostream& out, SplitFormat format);

struct ManifestExpectation {
  std::int64_t entailed = 0;
  std::int64_t not_entailed = 0;
};

struct ManifestReport {
  std::string split_name;
  LabelCounts observed;
  std::optional<ManifestExpectation> expected;  // empty -> UNCHECKED
  bool passed = false;  // meaningful only when expected is set
  std::int64_t delta_entailed = 0;      // observed - expected
  std::int64_t delta_not_entailed = 0;

  bool checked() const { return expected.has_value(); }
};

// PASS iff observed per-label counts equal the expectation; a mismatch is a
// FAIL result with per-label deltas, never an error.
ManifestReport validate_manifest(const DatasetSplit& split,
                                 const ManifestExpectation& expected);

}  // namespace nliaudit
