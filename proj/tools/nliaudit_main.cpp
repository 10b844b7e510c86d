// nliaudit: hypothesis-side bias audit for two-label NLI datasets.
//
// Subcommands:
//   audit     run the full pipeline and emit a report
//   validate  check a split's label counts against an expected manifest
//   synth     generate a synthetic split from a JSON spec
//   fetch     download the official SPR archive and record its checksum

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nliaudit/errors.hpp"
#include "nliaudit/fetch.hpp"
#include "nliaudit/reference.hpp"
#include "nliaudit/report.hpp"
#include "nliaudit/synth.hpp"
#include "nliaudit/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

nliaudit::SplitFormat format_or_detect(const std::string& format_flag,
                                       const std::filesystem::path& path) {
  if (format_flag.empty() || format_flag == "auto") return nliaudit::detect_format(path);
  auto f = nliaudit::parse_format(format_flag);
  if (!f)
    throw nliaudit::ConfigError("cli", "unknown format \"" + format_flag + "\"");
  return *f;
}

struct AuditFlags {
  std::string train, dev, test;
  std::string train_format = "auto", dev_format = "auto", test_format = "auto";
  std::string rules;
  bool prefer_metadata = false;
  double alpha = 0.05;
  int top_k = 10;
  std::int64_t min_freq = 5;
  std::string counting = "presence";
  std::string stop_list;
  double role_flag_threshold = 0.85;
  double word_flag_threshold = 0.70;
  bool official_manifest = false;
  std::vector<std::string> expects;
  std::string format = "json";
  std::string output;
  std::string config_file;
};

bool parse_bool_value(const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw nliaudit::ConfigError("cli", "expected a boolean, got \"" + value + "\"");
}

// Simple key=value config file, UTF-8, '#' comments; keys are the audit
// flag names without the leading dashes. Values given on the command line
// take precedence over the file.
void apply_config_file(const CLI::App& audit, AuditFlags& f) {
  std::ifstream in(f.config_file, std::ios::binary);
  if (!in)
    throw nliaudit::ConfigError("cli", "cannot read config file " + f.config_file);

  auto given = [&audit](const std::string& flag) {
    const CLI::Option* opt = audit.get_option_no_throw("--" + flag);
    return opt != nullptr && opt->count() > 0;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view sv = line;
    while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.front())))
      sv.remove_prefix(1);
    while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.back())))
      sv.remove_suffix(1);
    if (sv.empty() || sv.front() == '#') continue;
    auto eq = sv.find('=');
    if (eq == std::string_view::npos)
      throw nliaudit::ConfigError("cli", f.config_file + ":" + std::to_string(line_no) +
                                             ": expected key=value");
    std::string key(sv.substr(0, eq));
    std::string value(sv.substr(eq + 1));

    try {
      if (key == "expect") {
        f.expects.push_back(value);  // repeatable; merges with command-line values
        continue;
      }
      if (given(key)) continue;  // an explicit command-line flag wins
      if (key == "train") f.train = value;
      else if (key == "train-format") f.train_format = value;
      else if (key == "dev") f.dev = value;
      else if (key == "dev-format") f.dev_format = value;
      else if (key == "test") f.test = value;
      else if (key == "test-format") f.test_format = value;
      else if (key == "rules") f.rules = value;
      else if (key == "prefer-metadata") f.prefer_metadata = parse_bool_value(value);
      else if (key == "alpha") f.alpha = std::stod(value);
      else if (key == "top-k") f.top_k = std::stoi(value);
      else if (key == "min-freq") f.min_freq = std::stoll(value);
      else if (key == "counting") f.counting = value;
      else if (key == "stop-list") f.stop_list = value;
      else if (key == "role-flag-threshold") f.role_flag_threshold = std::stod(value);
      else if (key == "word-flag-threshold") f.word_flag_threshold = std::stod(value);
      else if (key == "official-manifest") f.official_manifest = parse_bool_value(value);
      else if (key == "format") f.format = value;
      else if (key == "output") f.output = value;
      else
        throw nliaudit::ConfigError("cli", f.config_file + ":" + std::to_string(line_no) +
                                               ": unknown key \"" + key + "\"");
    } catch (const nliaudit::ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw nliaudit::ConfigError("cli", f.config_file + ":" + std::to_string(line_no) +
                                             ": bad value for \"" + key + "\"");
    }
  }
}

nliaudit::AuditConfig to_config(const AuditFlags& f) {
  nliaudit::AuditConfig config;
  auto split_of = [](const std::string& path, const std::string& fmt)
      -> std::optional<nliaudit::SplitConfig> {
    if (path.empty()) return std::nullopt;
    nliaudit::SplitConfig sc;
    sc.path = path;
    if (!fmt.empty() && fmt != "auto") {
      auto parsed = nliaudit::parse_format(fmt);
      if (!parsed)
        throw nliaudit::ConfigError("cli", "unknown split format \"" + fmt + "\"");
      sc.format = *parsed;
    }
    return sc;
  };
  config.train = split_of(f.train, f.train_format);
  config.dev = split_of(f.dev, f.dev_format);
  config.test = split_of(f.test, f.test_format);
  if (!f.rules.empty()) config.rules_file = f.rules;
  config.prefer_metadata = f.prefer_metadata;
  config.alpha = f.alpha;
  config.top_k = f.top_k;
  config.min_freq = f.min_freq;
  auto mode = nliaudit::parse_counting_mode(f.counting);
  if (!mode)
    throw nliaudit::ConfigError("cli", "counting must be \"presence\" or \"token\"");
  config.counting = *mode;
  if (!f.stop_list.empty()) config.stop_list = f.stop_list;
  config.role_flag_threshold = f.role_flag_threshold;
  config.word_flag_threshold = f.word_flag_threshold;
  config.official_manifest = f.official_manifest;
  for (const auto& e : f.expects) {
    auto eq = e.find('=');
    auto comma = e.find(',', eq == std::string::npos ? 0 : eq);
    if (eq == std::string::npos || comma == std::string::npos)
      throw nliaudit::ConfigError("cli", "--expect wants name=ENTAILED,NOT_ENTAILED: " + e);
    try {
      nliaudit::ManifestExpectation exp;
      exp.entailed = std::stoll(e.substr(eq + 1, comma - eq - 1));
      exp.not_entailed = std::stoll(e.substr(comma + 1));
      config.expectations[e.substr(0, eq)] = exp;
    } catch (const std::exception&) {
      throw nliaudit::ConfigError("cli", "bad counts in --expect: " + e);
    }
  }
  auto fmt = nliaudit::parse_report_format(f.format);
  if (!fmt)
    throw nliaudit::ConfigError("cli", "format must be json, tsv, or markdown");
  config.format = *fmt;
  if (!f.output.empty()) config.output = f.output;
  return config;
}

int run_audit_command(const CLI::App& audit, AuditFlags& flags) {
  if (!flags.config_file.empty()) apply_config_file(audit, flags);
  nliaudit::AuditConfig config = to_config(flags);
  nliaudit::AuditReport report = nliaudit::run_audit(config);
  if (config.output)
    nliaudit::emit_to_file(report, config.format, *config.output);
  else
    nliaudit::emit(report, config.format, std::cout);
  return kExitOk;
}

struct ValidateFlags {
  std::string split;
  std::string split_format = "auto";
  std::string name = "custom";
  std::int64_t expect_entailed = -1;
  std::int64_t expect_not_entailed = -1;
};

int run_validate_command(const ValidateFlags& flags) {
  auto format = format_or_detect(flags.split_format, flags.split);
  nliaudit::DatasetSplit split = nliaudit::load_split(flags.split, format, flags.name);
  nliaudit::LabelCounts counts = split.label_counts();
  std::cout << "split: " << split.name << "\n"
            << "entailed: " << counts.entailed << "\n"
            << "not_entailed: " << counts.not_entailed << "\n"
            << "total: " << counts.total() << "\n"
            << "malformed_lines: " << split.malformed_lines << "\n";

  const bool has_expectation = flags.expect_entailed >= 0 || flags.expect_not_entailed >= 0;
  if (!has_expectation) {
    std::cout << "status: PASS\n";
    return kExitOk;
  }
  if (flags.expect_entailed < 0 || flags.expect_not_entailed < 0)
    throw nliaudit::ConfigError(
        "cli", "--expect-entailed and --expect-not-entailed must be given together");

  nliaudit::ManifestReport report = nliaudit::validate_manifest(
      split, {flags.expect_entailed, flags.expect_not_entailed});
  std::cout << "expected_entailed: " << report.expected->entailed << "\n"
            << "expected_not_entailed: " << report.expected->not_entailed << "\n"
            << "delta_entailed: " << report.delta_entailed << "\n"
            << "delta_not_entailed: " << report.delta_not_entailed << "\n"
            << "status: " << (report.passed ? "PASS" : "FAIL") << "\n";
  return report.passed ? kExitOk : kExitData;
}

struct SynthFlags {
  std::string spec;
  std::string output;
  std::string name = "train";
};

int run_synth_command(const SynthFlags& flags) {
  nliaudit::SynthSpec spec = nliaudit::load_synth_spec(flags.spec);
  nliaudit::DatasetSplit split = nliaudit::generate_synthetic(spec, flags.name);
  nliaudit::save_split(split, flags.output, nliaudit::SplitFormat::kTsv);
  std::cerr << "wrote " << split.size() << " records to " << flags.output << "\n";
  return kExitOk;
}

struct FetchFlags {
  std::string output_dir;
  std::string url = std::string(nliaudit::reference::kArchiveUrl);
  bool no_extract = false;
};

int run_fetch_command(const FetchFlags& flags) {
  nliaudit::FetchResult result =
      nliaudit::fetch_archive(flags.url, flags.output_dir, !flags.no_extract);
  std::cout << "archive: " << result.archive_path.string() << "\n"
            << "sha256: " << result.sha256_hex << "\n"
            << "extracted_files: " << result.extracted.size() << "\n";
  for (const auto& p : result.extracted) std::cout << "  " << p.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audits labeled NLI datasets for hypothesis-side statistical "
               "irregularities: role/label chi-square independence, per-role "
               "majority bias, PRBM accuracy, and give-away word rankings."};
  app.set_version_flag("--version", std::string(nliaudit::kToolVersion));
  app.require_subcommand(1);

  AuditFlags audit_flags;
  CLI::App* audit = app.add_subcommand("audit", "Run the full audit pipeline");
  audit->add_option("--train", audit_flags.train, "Training split path (required)");
  audit->add_option("--train-format", audit_flags.train_format, "tsv|jsonl|auto");
  audit->add_option("--dev", audit_flags.dev, "Dev split path");
  audit->add_option("--dev-format", audit_flags.dev_format, "tsv|jsonl|auto");
  audit->add_option("--test", audit_flags.test, "Test split path");
  audit->add_option("--test-format", audit_flags.test_format, "tsv|jsonl|auto");
  audit->add_option("--rules", audit_flags.rules,
                    "Tagging rules file (default: built-in table)");
  audit->add_flag("--prefer-metadata", audit_flags.prefer_metadata,
                  "Trust per-record proto_role annotations over rules");
  audit->add_option("--alpha", audit_flags.alpha, "Significance level (default 0.05)");
  audit->add_option("--top-k", audit_flags.top_k, "Words per lexical table (default 10)");
  audit->add_option("--min-freq", audit_flags.min_freq,
                    "Minimum frequency for lexical rankings (default 5)");
  audit->add_option("--counting", audit_flags.counting, "presence|token");
  audit->add_option("--stop-list", audit_flags.stop_list, "Stop-list file, one token per line");
  audit->add_option("--role-flag-threshold", audit_flags.role_flag_threshold,
                    "Flag roles with maj_pr at or above this (default 0.85)");
  audit->add_option("--word-flag-threshold", audit_flags.word_flag_threshold,
                    "Flag words with max P(l|w) at or above this (default 0.70)");
  audit->add_flag("--official-manifest", audit_flags.official_manifest,
                  "Check train/dev/test label counts against the published manifest");
  audit->add_option("--expect", audit_flags.expects,
                    "Expected counts per split, name=ENTAILED,NOT_ENTAILED (repeatable)");
  audit->add_option("--format", audit_flags.format, "json|tsv|markdown");
  audit->add_option("--output", audit_flags.output, "Report path (default: stdout)");
  audit->add_option("--config", audit_flags.config_file,
                    "Key=value config file mirroring these flags (flags win)");

  ValidateFlags validate_flags;
  CLI::App* validate = app.add_subcommand("validate", "Validate a split's label manifest");
  validate->add_option("--split", validate_flags.split, "Split path")->required();
  validate->add_option("--split-format", validate_flags.split_format, "tsv|jsonl|auto");
  validate->add_option("--name", validate_flags.name, "Split name (default custom)");
  validate->add_option("--expect-entailed", validate_flags.expect_entailed,
                       "Expected entailed count");
  validate->add_option("--expect-not-entailed", validate_flags.expect_not_entailed,
                       "Expected not-entailed count");

  SynthFlags synth_flags;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic split");
  synth->add_option("--spec", synth_flags.spec, "JSON spec file")->required();
  synth->add_option("--output", synth_flags.output, "Output TSV path")->required();
  synth->add_option("--name", synth_flags.name, "Split name (default train)");

  FetchFlags fetch_flags;
  CLI::App* fetch = app.add_subcommand(
      "fetch", "Download the official SPR archive (never done implicitly)");
  fetch->add_option("--output-dir", fetch_flags.output_dir, "Destination directory")
      ->required();
  fetch->add_option("--url", fetch_flags.url, "Archive URL (default: official location)");
  fetch->add_flag("--no-extract", fetch_flags.no_extract, "Download and checksum only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (audit->parsed()) return run_audit_command(*audit, audit_flags);
    if (validate->parsed()) return run_validate_command(validate_flags);
    if (synth->parsed()) return run_synth_command(synth_flags);
    if (fetch->parsed()) return run_fetch_command(fetch_flags);
    std::cerr << app.help();
    return kExitUsage;
  } catch (const nliaudit::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nliaudit::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const nliaudit::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
