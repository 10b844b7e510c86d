#include "nliaudit/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nliaudit/errors.hpp"
#include "nliaudit/reference.hpp"
#include "nliaudit/version.hpp"
#include "json.hpp"

namespace nliaudit {

namespace {

using nlohmann::json;

std::string format4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

std::optional<ReportFormat> parse_report_format(std::string_view name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "tsv") return ReportFormat::kTsv;
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  return std::nullopt;
}

std::string_view to_string(ReportFormat f) {
  switch (f) {
    case ReportFormat::kJson: return "json";
    case ReportFormat::kTsv: return "tsv";
    case ReportFormat::kMarkdown: return "markdown";
  }
  return "json";
}

void AuditConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("report", "alpha must lie in (0,1)");
  if (top_k < 1)
    throw ConfigError("report", "top-k must be >= 1");
  if (min_freq < 1)
    throw ConfigError("report", "min-freq must be >= 1");
  if (!(role_flag_threshold >= 0.0 && role_flag_threshold <= 1.0))
    throw ConfigError("report", "role-flag-threshold must lie in [0,1]");
  if (!(word_flag_threshold >= 0.0 && word_flag_threshold <= 1.0))
    throw ConfigError("report", "word-flag-threshold must lie in [0,1]");
}

namespace {

struct LoadedSplit {
  DatasetSplit split;
  TaggedSplit tagged;
};

std::optional<ManifestExpectation> expectation_for(const AuditConfig& config,
                                                   const DatasetSplit& split) {
  if (auto it = config.expectations.find(split.name); it != config.expectations.end())
    return it->second;
  if (config.official_manifest && split.kind != SplitKind::kCustom) {
    const auto& m = reference::kManifest[static_cast<std::size_t>(split.kind)];
    return ManifestExpectation{m.entailed, m.not_entailed};
  }
  return std::nullopt;
}

SplitAudit audit_split(const AuditConfig& config, const LoadedSplit& loaded,
                       const StopList* stop_list, std::vector<std::string>& warnings) {
  const DatasetSplit& split = loaded.split;
  const TaggedSplit& tagged = loaded.tagged;

  SplitAudit audit;
  audit.name = split.name;
  audit.kind = split.kind;
  audit.counts = split.label_counts();
  audit.malformed_lines = split.malformed_lines;

  if (auto expected = expectation_for(config, split)) {
    audit.manifest = validate_manifest(split, *expected);
  } else {
    audit.manifest.split_name = split.name;
    audit.manifest.observed = audit.counts;
  }

  audit.matched = tagged.matched();
  audit.unmatched = tagged.unmatched;
  audit.unknown_metadata = tagged.unknown_metadata;
  audit.role_counts = tagged.role_counts;

  if (split.malformed_lines > 0)
    warnings.push_back(split.name + ": skipped " + std::to_string(split.malformed_lines) +
                       " malformed input line(s)");
  if (tagged.unmatched > 0)
    warnings.push_back(split.name + ": " + std::to_string(tagged.unmatched) +
                       " record(s) matched no rule; excluded from the contingency table, "
                       "predicted with the fallback label in PRBM accuracy");
  if (tagged.unknown_metadata > 0)
    warnings.push_back(split.name + ": " + std::to_string(tagged.unknown_metadata) +
                       " proto_role annotation(s) named no known role");

  audit.chi = chi_square(build_contingency(tagged));
  if (!audit.chi.dropped_rows.empty()) {
    std::string roles;
    for (ProtoRole r : audit.chi.dropped_rows) {
      if (!roles.empty()) roles += ", ";
      roles += role_id(r);
    }
    warnings.push_back(split.name + ": dropped zero-count role row(s) [" + roles +
                       "] from the chi-square table; df adjusted to " +
                       std::to_string(audit.chi.df));
  }
  if (!audit.chi.dropped_cols.empty())
    warnings.push_back(split.name +
                       ": dropped a zero-count label column from the chi-square table");

  audit.bias.maj = majority_baseline(split);
  audit.bias.per_role = proto_role_bias(tagged);
  audit.bias.overall_bias = overall_proto_role_bias(audit.bias.per_role);
  audit.bias.total = static_cast<std::int64_t>(split.size());

  auto entries = word_label_stats(split, config.counting, stop_list);
  audit.top_entailed = top_k_by_label(entries, Label::kEntailed,
                                      static_cast<std::size_t>(config.top_k),
                                      config.min_freq);
  audit.top_not_entailed = top_k_by_label(entries, Label::kNotEntailed,
                                          static_cast<std::size_t>(config.top_k),
                                          config.min_freq);

  for (const auto& e : audit.bias.per_role)
    if (e.maj_pr >= config.role_flag_threshold) audit.flagged_roles.push_back(e);
  for (const auto& e : entries)
    if (e.max_p() >= config.word_flag_threshold && e.total_freq >= config.min_freq)
      audit.flagged_words.push_back(e);
  std::sort(audit.flagged_words.begin(), audit.flagged_words.end(),
            [](const LexicalEntry& a, const LexicalEntry& b) {
              if (a.max_p() != b.max_p()) return a.max_p() > b.max_p();
              return a.word < b.word;
            });

  return audit;
}

}  // namespace

AuditReport run_audit(const AuditConfig& config) {
  config.validate();
  if (!config.train)
    throw ConfigError("report", "a train split is required (PRBM needs training data)");

  std::vector<RoleRule> rules =
      config.rules_file ? load_rules(*config.rules_file) : default_rules();

  std::optional<StopList> stop_list;
  if (config.stop_list) stop_list = load_stop_list(*config.stop_list);

  struct NamedConfig {
    std::string_view name;
    const std::optional<SplitConfig>* cfg;
  };
  const NamedConfig ordered[] = {
      {"train", &config.train}, {"dev", &config.dev}, {"test", &config.test}};

  std::vector<LoadedSplit> loaded;
  for (const auto& [name, split_cfg] : ordered) {
    if (!split_cfg->has_value()) continue;
    const SplitConfig& sc = **split_cfg;
    SplitFormat format = sc.format ? *sc.format : detect_format(sc.path);
    LoadedSplit ls;
    ls.split = load_split(sc.path, format, name);
    ls.tagged = tag_split(ls.split, rules, config.prefer_metadata);
    loaded.push_back(std::move(ls));
  }

  AuditReport report;
  report.tool_name = std::string(kToolName);
  report.tool_version = std::string(kToolVersion);
  report.schema_version = kReportSchemaVersion;
  report.config = config;

  for (const auto& ls : loaded)
    report.splits.push_back(
        audit_split(config, ls, stop_list ? &*stop_list : nullptr, report.warnings));

  const LoadedSplit& train = loaded.front();
  report.prbm = train_prbm(train.tagged, majority_label(train.split));
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    report.splits[i].bias.prbm_accuracy = evaluate_prbm(report.prbm, loaded[i].tagged);
    report.splits[i].per_role_prbm = evaluate_prbm_per_role(report.prbm, loaded[i].tagged);
  }

  // The published train MAJ is inconsistent with the published label counts;
  // when the audited archive matches the official manifest, say so rather
  // than silently disagreeing with the reference table.
  for (const auto& audit : report.splits) {
    const auto& official = reference::kManifest[static_cast<std::size_t>(SplitKind::kTrain)];
    if (audit.kind == SplitKind::kTrain && audit.counts.entailed == official.entailed &&
        audit.counts.not_entailed == official.not_entailed) {
      report.warnings.push_back(
          "train: majority baseline computed from the label counts is " +
          format4(audit.bias.maj) + "; the published reference table reports " +
          format4(reference::kMaj[0]) +
          ", which is inconsistent with the published label counts (80,707 / 123,855). "
          "This report uses the value computed from the data.");
    }
  }

  return report;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

namespace {

json config_to_json(const AuditConfig& c) {
  json j;
  json splits = json::object();
  auto add_split = [&](std::string_view name, const std::optional<SplitConfig>& sc) {
    if (!sc) return;
    json s;
    s["path"] = sc->path.string();
    s["format"] = sc->format ? std::string(to_string(*sc->format)) : "auto";
    splits[std::string(name)] = s;
  };
  add_split("train", c.train);
  add_split("dev", c.dev);
  add_split("test", c.test);
  j["splits"] = splits;
  j["rules_file"] = c.rules_file ? c.rules_file->string() : "builtin";
  j["prefer_metadata"] = c.prefer_metadata;
  j["alpha"] = c.alpha;
  j["top_k"] = c.top_k;
  j["min_freq"] = c.min_freq;
  j["counting"] = std::string(to_string(c.counting));
  j["stop_list"] = c.stop_list ? c.stop_list->string() : "";
  j["role_flag_threshold"] = c.role_flag_threshold;
  j["word_flag_threshold"] = c.word_flag_threshold;
  j["official_manifest"] = c.official_manifest;
  json exp = json::object();
  for (const auto& [name, e] : c.expectations)
    exp[name] = {{"entailed", e.entailed}, {"not_entailed", e.not_entailed}};
  j["expectations"] = exp;
  j["format"] = std::string(to_string(c.format));
  j["output"] = c.output ? c.output->string() : "";
  return j;
}

json lexical_row(const LexicalEntry& e, Label label) {
  json j;
  j["word"] = e.word;
  j["p"] = format4(e.p(label));
  j["freq"] = e.freq(label);
  j["total_freq"] = e.total_freq;
  j["raw"] = {{"p", e.p(label)}};
  return j;
}

json split_to_json(const SplitAudit& a, double alpha) {
  json j;
  j["counts"] = {{"entailed", a.counts.entailed},
                 {"not_entailed", a.counts.not_entailed},
                 {"total", a.counts.total()}};
  j["malformed_lines"] = a.malformed_lines;

  json manifest;
  manifest["observed"] = {{"entailed", a.manifest.observed.entailed},
                          {"not_entailed", a.manifest.observed.not_entailed}};
  if (a.manifest.checked()) {
    manifest["expected"] = {{"entailed", a.manifest.expected->entailed},
                            {"not_entailed", a.manifest.expected->not_entailed}};
    manifest["delta"] = {{"entailed", a.manifest.delta_entailed},
                         {"not_entailed", a.manifest.delta_not_entailed}};
    manifest["status"] = a.manifest.passed ? "PASS" : "FAIL";
  } else {
    manifest["status"] = "UNCHECKED";
  }
  j["manifest"] = manifest;

  json tagging;
  tagging["matched"] = a.matched;
  tagging["unmatched"] = a.unmatched;
  tagging["unknown_metadata"] = a.unknown_metadata;
  json per_role_counts = json::object();
  for (ProtoRole r : all_proto_roles())
    per_role_counts[std::string(role_id(r))] = a.role_counts[role_index(r)];
  tagging["per_role_counts"] = per_role_counts;
  j["tagging"] = tagging;

  json chi;
  chi["statistic"] = format4(a.chi.statistic);
  chi["df"] = a.chi.df;
  chi["p_value"] = format_p_value(a.chi.p_value);
  chi["significant_at_alpha"] = a.chi.p_value < alpha;
  json dropped_rows = json::array();
  for (ProtoRole r : a.chi.dropped_rows) dropped_rows.push_back(std::string(role_id(r)));
  chi["dropped_rows"] = dropped_rows;
  json dropped_cols = json::array();
  for (Label l : a.chi.dropped_cols) dropped_cols.push_back(std::string(to_string(l)));
  chi["dropped_cols"] = dropped_cols;
  json expected = json::object();
  for (std::size_t i = 0; i < a.chi.rows.size(); ++i) {
    json row = json::array();
    for (std::size_t c = 0; c < a.chi.cols.size(); ++c)
      row.push_back(a.chi.expected[i][c]);
    expected[std::string(role_id(a.chi.rows[i]))] = row;
  }
  json chi_cols = json::array();
  for (Label l : a.chi.cols) chi_cols.push_back(std::string(to_string(l)));
  chi["raw"] = {{"statistic", a.chi.statistic},
                {"p_value", a.chi.p_value},
                {"expected", expected},
                {"cols", chi_cols}};
  j["chi_square"] = chi;

  json bias;
  bias["maj"] = format4(a.bias.maj);
  bias["prbm_accuracy"] = format4(a.bias.prbm_accuracy);
  bias["overall_proto_role_bias"] = format4(a.bias.overall_bias);
  bias["total"] = a.bias.total;
  json per_role = json::array();
  json raw_per_role = json::object();
  for (const auto& e : a.bias.per_role) {
    json entry = {{"role", std::string(role_id(e.role))},
                  {"majority_label", std::string(to_string(e.majority_label))},
                  {"maj_pr", format4(e.maj_pr)},
                  {"support", e.support}};
    json raw_entry = {{"maj_pr", e.maj_pr}};
    if (auto acc = a.per_role_prbm[role_index(e.role)]) {
      entry["prbm_accuracy"] = format4(*acc);
      raw_entry["prbm_accuracy"] = *acc;
    }
    per_role.push_back(entry);
    raw_per_role[std::string(role_id(e.role))] = raw_entry;
  }
  bias["per_role"] = per_role;
  bias["raw"] = {{"maj", a.bias.maj},
                 {"prbm_accuracy", a.bias.prbm_accuracy},
                 {"overall_proto_role_bias", a.bias.overall_bias},
                 {"per_role", raw_per_role}};
  j["bias"] = bias;

  json lexical;
  json top_e = json::array();
  for (const auto& e : a.top_entailed) top_e.push_back(lexical_row(e, Label::kEntailed));
  json top_ne = json::array();
  for (const auto& e : a.top_not_entailed)
    top_ne.push_back(lexical_row(e, Label::kNotEntailed));
  lexical["top_entailed"] = top_e;
  lexical["top_not_entailed"] = top_ne;
  j["lexical"] = lexical;

  json flags;
  json roles = json::array();
  for (const auto& e : a.flagged_roles)
    roles.push_back({{"role", std::string(role_id(e.role))},
                     {"majority_label", std::string(to_string(e.majority_label))},
                     {"maj_pr", format4(e.maj_pr)},
                     {"support", e.support}});
  json words = json::array();
  for (const auto& e : a.flagged_words) {
    Label skewed = e.p(Label::kEntailed) >= e.p(Label::kNotEntailed) ? Label::kEntailed
                                                                     : Label::kNotEntailed;
    words.push_back({{"word", e.word},
                     {"label", std::string(to_string(skewed))},
                     {"p", format4(e.p(skewed))},
                     {"freq", e.freq(skewed)},
                     {"total_freq", e.total_freq}});
  }
  flags["roles"] = roles;
  flags["words"] = words;
  flags["policy"] = "tool policy, not part of the published analysis";
  j["flags"] = flags;

  return j;
}

std::string render_json(const AuditReport& r) {
  json j;
  j["tool"] = {{"name", r.tool_name}, {"version", r.tool_version}};
  j["schema_version"] = r.schema_version;
  j["config"] = config_to_json(r.config);

  json splits = json::object();
  for (const auto& a : r.splits) splits[a.name] = split_to_json(a, r.config.alpha);
  j["splits"] = splits;

  json prbm;
  prbm["trained_on"] = r.prbm.trained_on;
  prbm["fallback"] = std::string(to_string(r.prbm.fallback));
  json mapping = json::object();
  for (ProtoRole role : all_proto_roles())
    mapping[std::string(role_id(role))] =
        std::string(to_string(r.prbm.role_to_label[role_index(role)]));
  prbm["role_to_label"] = mapping;
  json acc = json::object();
  json raw_acc = json::object();
  for (const auto& a : r.splits) {
    acc[a.name] = format4(a.bias.prbm_accuracy);
    raw_acc[a.name] = a.bias.prbm_accuracy;
  }
  prbm["accuracy"] = acc;
  prbm["raw"] = {{"accuracy", raw_acc}};
  j["prbm"] = prbm;

  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

// Shared table renderer for the TSV and Markdown forms; they differ only in
// row framing.
class TableWriter {
 public:
  TableWriter(std::ostream& out, bool markdown) : out_(out), markdown_(markdown) {}

  void section(std::string_view title) {
    if (markdown_)
      out_ << "\n## " << title << "\n\n";
    else
      out_ << "\n# " << title << "\n";
  }

  void row(const std::vector<std::string>& cells, bool header = false) {
    if (markdown_) {
      out_ << "|";
      for (const auto& c : cells) out_ << " " << c << " |";
      out_ << "\n";
      if (header) {
        out_ << "|";
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << " --- |";
        out_ << "\n";
      }
    } else {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << '\t';
        out_ << cells[i];
      }
      out_ << '\n';
    }
  }

  void line(std::string_view text) { out_ << text << "\n"; }

 private:
  std::ostream& out_;
  bool markdown_;
};

void render_tables(const AuditReport& r, std::ostream& out, bool markdown) {
  TableWriter w(out, markdown);
  if (markdown)
    out << "# " << r.tool_name << " report (v" << r.schema_version << ", tool "
        << r.tool_version << ")\n";
  else
    out << "# " << r.tool_name << " report\ttool=" << r.tool_version
        << "\tschema=" << r.schema_version << "\n";

  std::vector<std::string> split_names;
  for (const auto& a : r.splits) split_names.push_back(a.name);

  w.section("manifest");
  w.row({"split", "entailed", "not_entailed", "total", "malformed", "expected_entailed",
         "expected_not_entailed", "status"},
        true);
  for (const auto& a : r.splits) {
    std::string ee = "-", en = "-", status = "UNCHECKED";
    if (a.manifest.checked()) {
      ee = std::to_string(a.manifest.expected->entailed);
      en = std::to_string(a.manifest.expected->not_entailed);
      status = a.manifest.passed ? "PASS" : "FAIL";
    }
    w.row({a.name, std::to_string(a.counts.entailed), std::to_string(a.counts.not_entailed),
           std::to_string(a.counts.total()), std::to_string(a.malformed_lines), ee, en,
           status});
  }

  w.section("tagging");
  w.row({"split", "matched", "unmatched", "unknown_metadata"}, true);
  for (const auto& a : r.splits)
    w.row({a.name, std::to_string(a.matched), std::to_string(a.unmatched),
           std::to_string(a.unknown_metadata)});

  w.section("chi_square");
  {
    std::vector<std::string> header = {"metric"};
    header.insert(header.end(), split_names.begin(), split_names.end());
    w.row(header, true);
    std::vector<std::string> stat = {"statistic"}, df = {"df"}, p = {"p"},
                             sig = {"significant_at_alpha"};
    for (const auto& a : r.splits) {
      stat.push_back(format4(a.chi.statistic));
      df.push_back(std::to_string(a.chi.df));
      p.push_back(format_p_value(a.chi.p_value));
      sig.push_back(a.chi.p_value < r.config.alpha ? "yes" : "no");
    }
    w.row(stat);
    w.row(df);
    w.row(p);
    w.row(sig);
  }

  w.section("baselines");
  {
    std::vector<std::string> header = {"metric"};
    header.insert(header.end(), split_names.begin(), split_names.end());
    w.row(header, true);
    std::vector<std::string> maj = {"maj"}, prbm = {"prbm"}, overall = {"overall_proto_role_bias"};
    for (const auto& a : r.splits) {
      maj.push_back(format4(a.bias.maj));
      prbm.push_back(format4(a.bias.prbm_accuracy));
      overall.push_back(format4(a.bias.overall_bias));
    }
    w.row(maj);
    w.row(prbm);
    w.row(overall);
  }

  w.section("proto_role_bias");
  {
    std::vector<std::string> header = {"role"};
    header.insert(header.end(), split_names.begin(), split_names.end());
    w.row(header, true);
    for (ProtoRole role : all_proto_roles()) {
      std::vector<std::string> cells = {std::string(role_display_name(role))};
      for (const auto& a : r.splits) {
        auto it = std::find_if(a.bias.per_role.begin(), a.bias.per_role.end(),
                               [role](const auto& e) { return e.role == role; });
        cells.push_back(it == a.bias.per_role.end() ? "-" : format4(it->maj_pr));
      }
      w.row(cells);
    }
  }

  w.section("proto_role_prbm_accuracy");
  {
    std::vector<std::string> header = {"role"};
    header.insert(header.end(), split_names.begin(), split_names.end());
    w.row(header, true);
    for (ProtoRole role : all_proto_roles()) {
      std::vector<std::string> cells = {std::string(role_display_name(role))};
      for (const auto& a : r.splits) {
        auto acc = a.per_role_prbm[role_index(role)];
        cells.push_back(acc ? format4(*acc) : "-");
      }
      w.row(cells);
    }
  }

  w.section("role_support");
  {
    std::vector<std::string> header = {"role"};
    header.insert(header.end(), split_names.begin(), split_names.end());
    w.row(header, true);
    for (ProtoRole role : all_proto_roles()) {
      std::vector<std::string> cells = {std::string(role_display_name(role))};
      for (const auto& a : r.splits)
        cells.push_back(std::to_string(a.role_counts[role_index(role)]));
      w.row(cells);
    }
  }

  for (const auto& a : r.splits) {
    for (Label label : {Label::kNotEntailed, Label::kEntailed}) {
      w.section("lexical " + a.name + " " + std::string(to_string(label)));
      w.row({"word", "p", "freq"}, true);
      const auto& rows = label == Label::kEntailed ? a.top_entailed : a.top_not_entailed;
      for (const auto& e : rows)
        w.row({e.word, format4(e.p(label)), std::to_string(e.freq(label))});
    }
  }

  w.section("give_away_flags");
  w.row({"split", "kind", "feature", "value", "detail"}, true);
  for (const auto& a : r.splits) {
    for (const auto& e : a.flagged_roles)
      w.row({a.name, "role", std::string(role_id(e.role)), format4(e.maj_pr),
             "majority=" + std::string(to_string(e.majority_label)) +
                 " support=" + std::to_string(e.support)});
    for (const auto& e : a.flagged_words) {
      Label skewed = e.p(Label::kEntailed) >= e.p(Label::kNotEntailed) ? Label::kEntailed
                                                                       : Label::kNotEntailed;
      w.row({a.name, "word", e.word, format4(e.p(skewed)),
             "label=" + std::string(to_string(skewed)) +
                 " freq=" + std::to_string(e.total_freq)});
    }
  }

  w.section("warnings");
  if (markdown) {
    for (const auto& warning : r.warnings) w.line("- " + warning);
  } else {
    for (const auto& warning : r.warnings) w.line(warning);
  }
}

}  // namespace

std::string render(const AuditReport& report, ReportFormat format) {
  if (format == ReportFormat::kJson) return render_json(report);
  std::ostringstream out;
  render_tables(report, out, format == ReportFormat::kMarkdown);
  return out.str();
}

void emit(const AuditReport& report, ReportFormat format, std::ostream& out) {
  out << render(report, format);
}

void emit_to_file(const AuditReport& report, ReportFormat format,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw DataError("report", "cannot write " + path.string());
  emit(report, format, out);
  out.flush();
  if (!out)
    throw DataError("report", "write failed for " + path.string());
}

}  // namespace nliaudit
