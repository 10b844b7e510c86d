#include "nliaudit/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "nliaudit/errors.hpp"
#include "json.hpp"

namespace nliaudit {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(Label l) {
  return l == Label::kEntailed ? "entailed" : "not-entailed";
}

std::optional<Label> parse_label(std::string_view raw) {
  std::string s = to_lower(trim(raw));
  if (s == "entailed") return Label::kEntailed;
  if (s == "not-entailed" || s == "not_entailed" || s == "non-entailed")
    return Label::kNotEntailed;
  return std::nullopt;
}

SplitKind split_kind_from_name(std::string_view name) {
  std::string s = to_lower(trim(name));
  if (s == "train") return SplitKind::kTrain;
  if (s == "dev") return SplitKind::kDev;
  if (s == "test") return SplitKind::kTest;
  return SplitKind::kCustom;
}

std::string_view to_string(SplitKind kind) {
  switch (kind) {
    case SplitKind::kTrain: return "train";
    case SplitKind::kDev: return "dev";
    case SplitKind::kTest: return "test";
    case SplitKind::kCustom: return "custom";
  }
  return "custom";
}

LabelCounts DatasetSplit::label_counts() const {
  LabelCounts c;
  for (const auto& r : records) {
    if (r.label == Label::kEntailed)
      ++c.entailed;
    else
      ++c.not_entailed;
  }
  return c;
}

std::optional<SplitFormat> parse_format(std::string_view name) {
  std::string s = to_lower(trim(name));
  if (s == "tsv") return SplitFormat::kTsv;
  if (s == "jsonl" || s == "json-lines" || s == "jsonlines") return SplitFormat::kJsonLines;
  return std::nullopt;
}

std::string_view to_string(SplitFormat f) {
  return f == SplitFormat::kTsv ? "tsv" : "jsonl";
}

SplitFormat detect_format(const std::filesystem::path& path) {
  std::string ext = to_lower(path.extension().string());
  if (ext == ".tsv" || ext == ".tab" || ext == ".txt") return SplitFormat::kTsv;
  if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return SplitFormat::kJsonLines;
  std::ifstream in(path);
  char c = 0;
  while (in.get(c)) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{' ? SplitFormat::kJsonLines : SplitFormat::kTsv;
  }
  return SplitFormat::kTsv;
}

namespace {

// Returns the parsed record, std::nullopt for a malformed line, and throws
// DataError for a recognizable record with an unknown label string.
std::optional<NliRecord> parse_tsv_line(std::string_view line, std::size_t line_no,
                                        std::string_view source) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  if (fields.size() != 3) return std::nullopt;

  auto label = parse_label(fields[2]);
  if (!label) {
    throw DataError("corpus", std::string(source) + ":" + std::to_string(line_no) +
                                  ": unknown label \"" + std::string(trim(fields[2])) + "\"");
  }
  NliRecord rec;
  rec.premise = std::string(fields[0]);
  rec.hypothesis = std::string(fields[1]);
  rec.label = *label;
  if (trim(rec.hypothesis).empty()) return std::nullopt;
  return rec;
}

std::optional<NliRecord> parse_jsonl_line(std::string_view line, std::size_t line_no,
                                          std::string_view source) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  if (!j.contains("hypothesis") || !j["hypothesis"].is_string()) return std::nullopt;
  if (!j.contains("label") || !j["label"].is_string()) return std::nullopt;

  auto label = parse_label(j["label"].get<std::string>());
  if (!label) {
    throw DataError("corpus", std::string(source) + ":" + std::to_string(line_no) +
                                  ": unknown label \"" + j["label"].get<std::string>() + "\"");
  }
  NliRecord rec;
  if (j.contains("context") && j["context"].is_string())
    rec.premise = j["context"].get<std::string>();
  rec.hypothesis = j["hypothesis"].get<std::string>();
  rec.label = *label;
  if (j.contains("proto_role") && j["proto_role"].is_string())
    rec.proto_role_meta = j["proto_role"].get<std::string>();
  if (trim(rec.hypothesis).empty()) return std::nullopt;
  return rec;
}

}  // namespace

DatasetSplit load_split_from(std::istream& in, SplitFormat format,
                             std::string_view name, std::string_view source) {
  DatasetSplit split;
  split.name = std::string(name);
  split.kind = split_kind_from_name(name);

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;  // blank lines carry no record

    std::optional<NliRecord> rec =
        format == SplitFormat::kTsv ? parse_tsv_line(line, line_no, source)
                                    : parse_jsonl_line(line, line_no, source);
    if (rec)
      split.records.push_back(std::move(*rec));
    else
      ++split.malformed_lines;
  }

  if (split.records.empty())
    throw DataError("corpus", std::string(source) + ": zero well-formed records");
  return split;
}

DatasetSplit load_split(const std::filesystem::path& path, SplitFormat format,
                        std::string_view name) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DataError("corpus", "cannot read " + path.string());
  return load_split_from(in, format, name, path.string());
}

namespace {

void require_tsv_safe(const std::string& field, const std::string& what) {
  if (field.find('\t') != std::string::npos || field.find('\n') != std::string::npos ||
      field.find('\r') != std::string::npos)
    throw DataError("corpus", what + " contains a tab or newline; not representable in tsv");
}

}  // namespace

void save_split_to(const DatasetSplit& split, std::ostream& out, SplitFormat format) {
  for (const auto& r : split.records) {
    if (format == SplitFormat::kTsv) {
      require_tsv_safe(r.premise, "premise");
      require_tsv_safe(r.hypothesis, "hypothesis");
      out << r.premise << '\t' << r.hypothesis << '\t' << to_string(r.label) << '\n';
    } else {
      nlohmann::json j;
      j["context"] = r.premise;
      j["hypothesis"] = r.hypothesis;
      j["label"] = std::string(to_string(r.label));
      if (r.proto_role_meta) j["proto_role"] = *r.proto_role_meta;
      out << j.dump() << '\n';
    }
  }
}

void save_split(const DatasetSplit& split, const std::filesystem::path& path,
                SplitFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw DataError("corpus", "cannot write " + path.string());
  save_split_to(split, out, format);
}

ManifestReport validate_manifest(const DatasetSplit& split,
                                 const ManifestExpectation& expected) {
  ManifestReport report;
  report.split_name = split.name;
  report.observed = split.label_counts();
  report.expected = expected;
  report.delta_entailed = report.observed.entailed - expected.entailed;
  report.delta_not_entailed = report.observed.not_entailed - expected.not_entailed;
  report.passed = report.delta_entailed == 0 && report.delta_not_entailed == 0;
  return report;
}

}  // namespace nliaudit
