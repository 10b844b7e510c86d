// Acceptance suite. Tier 1 is self-contained; tier 2 needs the official SPR
// archive on disk, located via NLIAUDIT_SPR_TRAIN/DEV/TEST (file paths) or
// NLIAUDIT_SPR_DIR (directory searched for conventional names). Without the
// dataset, tier 2 reports SKIP and the process exits 77 when only tier 2 was
// requested, so ctest records a skip rather than a pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nliaudit/bias.hpp"
#include "nliaudit/corpus.hpp"
#include "nliaudit/lexical.hpp"
#include "nliaudit/reference.hpp"
#include "nliaudit/report.hpp"
#include "nliaudit/stats.hpp"
#include "nliaudit/synth.hpp"
#include "oracles.hpp"
#include "pipeline_check.hpp"
#include "test_util.hpp"

using namespace nliaudit;

namespace {

int g_pass = 0, g_fail = 0, g_skip = 0;

class Criterion {
 public:
  Criterion(int number, std::string title) : number_(number), title_(std::move(title)) {}

  void check(bool ok, const std::string& detail) {
    if (!ok && failures_.size() < 4) failures_.push_back(detail);
    if (!ok) failed_ = true;
  }

  void check_abs(double got, double want, double tol, const std::string& what) {
    check(std::fabs(got - want) <= tol,
          what + ": got " + std::to_string(got) + ", want " + std::to_string(want) +
              " +/- " + std::to_string(tol));
  }

  void note(const std::string& text) { notes_.push_back(text); }

  void skip(const std::string& why) {
    std::printf("[SKIP] criterion %d: %s (%s)\n", number_, title_.c_str(), why.c_str());
    ++g_skip;
    resolved_ = true;
  }

  ~Criterion() {
    if (resolved_) return;
    if (failed_) {
      std::printf("[FAIL] criterion %d: %s\n", number_, title_.c_str());
      for (const auto& f : failures_) std::printf("       %s\n", f.c_str());
      ++g_fail;
    } else {
      std::string suffix;
      for (const auto& n : notes_) suffix += " | " + n;
      std::printf("[PASS] criterion %d: %s%s\n", number_, title_.c_str(), suffix.c_str());
      ++g_pass;
    }
  }

 private:
  int number_;
  std::string title_;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
  bool failed_ = false;
  bool resolved_ = false;
};

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

// ---------------------------------------------------------------------- tier 1

void criterion_1_worked_example() {
  Criterion c(1, "worked example: MAJ 0.55, overall bias = PRBM accuracy = 0.65");
  testutil::TempDir dir;
  SynthSpec spec;
  spec.seed = 1;
  spec.roles = {{ProtoRole::kInstigation, 100, 0.6}, {ProtoRole::kAwareness, 100, 0.3}};
  write_synthetic(spec, dir.file("train.tsv"));

  AuditConfig config;
  config.train = SplitConfig{dir.file("train.tsv"), SplitFormat::kTsv};
  AuditReport report = run_audit(config);
  const SplitAudit& train = report.splits.at(0);

  c.check(train.bias.maj == 0.55, "MAJ != 0.55 exactly (got " + fmt4(train.bias.maj) + ")");
  c.check(train.bias.overall_bias == train.bias.prbm_accuracy,
          "overall bias and PRBM train accuracy are not identical");
  c.check(train.bias.overall_bias == 0.65,
          "overall bias != 0.65 exactly (got " + fmt4(train.bias.overall_bias) + ")");
  c.check(train.bias.per_role.size() == 2 && train.bias.per_role[0].maj_pr == 0.6 &&
              train.bias.per_role[1].maj_pr == 0.7,
          "per-role biases are not exactly {0.6, 0.7}");
  c.note("maj=" + fmt4(train.bias.maj) + " overall=" + fmt4(train.bias.overall_bias) +
         " prbm=" + fmt4(train.bias.prbm_accuracy));
}

void criterion_2_chi_square_numerics() {
  Criterion c(2, "chi-square numerics: hand table, closed forms, quadrature oracle");

  ChiSquareResult r = chi_square(ContingencyTable::from_counts(
      {ProtoRole::kInstigation, ProtoRole::kVolition}, {{{10, 20}}, {{20, 10}}}));
  c.check(std::fabs(r.statistic - 20.0 / 3.0) <= 1e-9,
          "statistic for [[10,20],[20,10]] is not 20/3 within 1e-9");
  c.check(fmt4(r.statistic) == "6.6667", "statistic does not display as 6.6667");
  c.check(r.df == 1, "df of the 2x2 table is not 1");

  c.check(std::fabs(chi_square_sf(2.0, 2) - std::exp(-1.0)) <= 1e-12,
          "sf(2, df=2) is not exp(-1) within 1e-12");
  for (int df = 1; df <= 30; ++df)
    c.check(chi_square_sf(0.0, df) == 1.0,
            "sf(0, df=" + std::to_string(df) + ") is not exactly 1");

  const std::pair<double, int> points[20] = {
      {0.5, 1},  {1.0, 1},   {3.84, 1},  {6.6667, 1}, {60.0, 1},
      {0.25, 2}, {2.0, 2},   {12.0, 2},  {2.0, 3},    {5.0, 5},
      {10.0, 5}, {4.0, 10},  {18.31, 10}, {7.26, 15}, {25.0, 15},
      {30.58, 15}, {50.0, 15}, {18.49, 30}, {40.0, 30}, {77.9, 60}};
  double worst = 0.0;
  for (const auto& [x, df] : points) {
    double err = std::fabs(chi_square_sf(x, df) - oracle::chi_square_sf(x, df));
    worst = std::max(worst, err);
    c.check(err <= 1e-8, "sf(" + std::to_string(x) + ", " + std::to_string(df) +
                             ") off the quadrature oracle by " + std::to_string(err));
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "max |sf-oracle| = %.2e over 20 points", worst);
  c.note(buf);
}

void criterion_3_oracle_equivalence() {
  Criterion c(3, "brute-force oracle equivalence on 50 randomized splits");
  auto result = pipeline_check::run_oracle_equivalence(50, 20260811);
  c.check(result.ok, result.first_failure);
  c.note(std::to_string(result.comparisons) + " comparisons at 1e-12 relative");
}

void criterion_4_property_suite() {
  Criterion c(4, "property suite: PRBM>=MAJ, sum P(l|w)=1, label swap, permutation, "
                 "byte determinism");
  auto result = pipeline_check::run_property_suite(50, 11082026);
  c.check(result.ok, result.first_failure);
  c.note(std::to_string(result.comparisons) + " properties checked");
}

// ---------------------------------------------------------------------- tier 2

struct SprPaths {
  std::filesystem::path train, dev, test;
};

std::optional<std::filesystem::path> find_split_file(const std::filesystem::path& dir,
                                                     const std::string& split) {
  const std::string prefixes[] = {"", "spr_", "sprl_", "spr.", "sprl.", "spr-", "sprl-"};
  const std::string suffixes[] = {".jsonl", ".json", ".tsv", ".txt", ""};
  for (const auto& p : prefixes)
    for (const auto& s : suffixes) {
      std::filesystem::path candidate = dir / (p + split + s);
      if (std::filesystem::is_regular_file(candidate)) return candidate;
    }
  return std::nullopt;
}

std::optional<SprPaths> locate_dataset() {
  const char* train = std::getenv("NLIAUDIT_SPR_TRAIN");
  const char* dev = std::getenv("NLIAUDIT_SPR_DEV");
  const char* test = std::getenv("NLIAUDIT_SPR_TEST");
  if (train && dev && test) {
    SprPaths p{train, dev, test};
    if (std::filesystem::is_regular_file(p.train) &&
        std::filesystem::is_regular_file(p.dev) &&
        std::filesystem::is_regular_file(p.test))
      return p;
    return std::nullopt;
  }
  if (const char* dir_env = std::getenv("NLIAUDIT_SPR_DIR")) {
    std::filesystem::path dir(dir_env);
    auto t = find_split_file(dir, "train");
    auto d = find_split_file(dir, "dev");
    auto e = find_split_file(dir, "test");
    if (t && d && e) return SprPaths{*t, *d, *e};
  }
  return std::nullopt;
}

constexpr const char* kSkipReason =
    "official SPR archive not present; set NLIAUDIT_SPR_TRAIN/DEV/TEST or "
    "NLIAUDIT_SPR_DIR after running `nliaudit fetch`";

void run_tier2() {
  auto paths = locate_dataset();
  if (!paths) {
    const char* titles[] = {
        "manifest: label counts equal the published statistics exactly",
        "MAJ dev/test within 1e-4 of published; train inconsistency warned",
        "chi-square: df 15, statistic within 2%, p below 1e-15",
        "PRBM accuracies within 0.01; all 16 per-role values within 0.01",
        "lexical dev top-5: published sets, counts within 3, P within 0.02",
        "runtime: three-split audit with emission under 10 s",
    };
    for (int n = 5; n <= 10; ++n) {
      Criterion c(n, titles[n - 5]);
      c.skip(kSkipReason);
    }
    return;
  }

  AuditConfig config;
  config.train = SplitConfig{paths->train, std::nullopt};
  config.dev = SplitConfig{paths->dev, std::nullopt};
  config.test = SplitConfig{paths->test, std::nullopt};
  config.official_manifest = true;
  config.top_k = 5;

  auto started = std::chrono::steady_clock::now();
  AuditReport report = run_audit(config);
  std::string rendered = render(report, ReportFormat::kJson);
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  if (report.splits.size() != 3) {
    Criterion c(5, "official manifest counts");
    c.check(false, "expected 3 splits in the report");
    return;
  }
  const SplitAudit& train = report.splits[0];
  const SplitAudit& dev = report.splits[1];
  const SplitAudit& test = report.splits[2];
  const SplitAudit* splits[3] = {&train, &dev, &test};

  {
    Criterion c(5, "manifest: label counts equal the published statistics exactly");
    for (const auto* s : splits) {
      c.check(s->manifest.checked() && s->manifest.passed,
              s->name + ": manifest status " +
                  (s->manifest.checked() ? (s->manifest.passed ? "PASS" : "FAIL")
                                         : "UNCHECKED"));
      c.note(s->name + "=" + std::to_string(s->counts.entailed) + "/" +
             std::to_string(s->counts.not_entailed));
    }
  }

  {
    Criterion c(6, "MAJ dev/test within 1e-4 of published; train inconsistency warned");
    c.check_abs(dev.bias.maj, reference::kMaj[1], 1e-4, "MAJ dev");
    c.check_abs(test.bias.maj, reference::kMaj[2], 1e-4, "MAJ test");
    bool warned = false;
    for (const auto& w : report.warnings)
      if (w.find("0.6635") != std::string::npos) warned = true;
    c.check(warned, "no train-MAJ inconsistency warning in the report");
    c.check_abs(train.bias.maj, reference::kMajTrainFromManifest, 1e-4,
                "MAJ train (computed from counts)");
    c.note("maj train=" + fmt4(train.bias.maj) + " dev=" + fmt4(dev.bias.maj) +
           " test=" + fmt4(test.bias.maj));
  }

  {
    Criterion c(7, "chi-square: df 15, statistic within 2%, p below 1e-15");
    for (int i = 0; i < 3; ++i) {
      const SplitAudit& s = *splits[i];
      c.check(s.chi.df == 15, s.name + ": df " + std::to_string(s.chi.df) + " != 15");
      double ref = reference::kChiSquare[i];
      c.check(std::fabs(s.chi.statistic - ref) <= 0.02 * ref,
              s.name + ": statistic " + fmt4(s.chi.statistic) + " not within 2% of " +
                  fmt4(ref));
      c.check(format_p_value(s.chi.p_value) == "< 1e-15",
              s.name + ": p displays as " + format_p_value(s.chi.p_value));
      c.note(s.name + " chi2=" + fmt4(s.chi.statistic));
    }
  }

  {
    Criterion c(8, "PRBM accuracies within 0.01; all 16 per-role values within 0.01");
    for (int i = 0; i < 3; ++i) {
      const SplitAudit& s = *splits[i];
      c.check_abs(s.bias.prbm_accuracy, reference::kPrbm[i], 0.01, s.name + ": PRBM");
      c.check(s.bias.per_role.size() == 16,
              s.name + ": only " + std::to_string(s.bias.per_role.size()) +
                  " roles have support");
      // The published per-role table is the train-model's per-role accuracy
      // (maj_pr itself on train); it goes below 0.5 where a role's majority
      // flips across splits, which split-local maj_pr cannot.
      for (ProtoRole role : all_proto_roles()) {
        auto acc = s.per_role_prbm[role_index(role)];
        c.check(acc.has_value(),
                s.name + ": no records for role " + std::string(role_id(role)));
        if (acc)
          c.check_abs(*acc, reference::kRoleBias[role_index(role)][i], 0.01,
                      s.name + ": per-role accuracy " + std::string(role_id(role)));
      }
    }
    c.note("prbm train=" + fmt4(train.bias.prbm_accuracy) +
           " dev=" + fmt4(dev.bias.prbm_accuracy) + " test=" + fmt4(test.bias.prbm_accuracy));
  }

  {
    Criterion c(9, "lexical dev top-5: published sets, counts within 3, P within 0.02");
    std::set<std::string> got_ne;
    for (const auto& e : dev.top_not_entailed) got_ne.insert(e.word);
    std::set<std::string> want_ne = {"market", "that", "stock", "company", "they"};
    c.check(got_ne == want_ne, "not-entailed top-5 set mismatch");

    auto check_rows = [&c](const std::vector<LexicalEntry>& rows, Label label,
                           const auto& published, const char* which) {
      for (const auto& ref_row : published) {
        const LexicalEntry* found = nullptr;
        for (const auto& e : rows)
          if (e.word == ref_row.word) found = &e;
        c.check(found != nullptr,
                std::string(which) + ": " + std::string(ref_row.word) + " not in top-5");
        if (!found) continue;
        c.check(std::llabs(found->freq(label) - ref_row.freq) <= 3,
                std::string(which) + ": freq(" + std::string(ref_row.word) + ") = " +
                    std::to_string(found->freq(label)) + " vs published " +
                    std::to_string(ref_row.freq));
        c.check_abs(found->p(label), ref_row.p, 0.02,
                    std::string(which) + ": P(l|" + std::string(ref_row.word) + ")");
      }
    };
    check_rows(dev.top_not_entailed, Label::kNotEntailed, reference::kTopNotEntailedDev,
               "not-entailed");
    check_rows(dev.top_entailed, Label::kEntailed, reference::kTopEntailedDev, "entailed");

    // shared-word identity, on published values and on the computed ones
    SplitFormat dev_format = detect_format(paths->dev);
    DatasetSplit dev_split = load_split(paths->dev, dev_format, "dev");
    auto entries = word_label_stats(dev_split);
    for (std::string_view word : {"stock", "they", "company"}) {
      double published_sum = 0.0;
      for (const auto& row : reference::kTopNotEntailedDev)
        if (row.word == word) published_sum += row.p;
      for (const auto& row : reference::kTopEntailedDev)
        if (row.word == word) published_sum += row.p;
      c.check_abs(published_sum, 1.0, 5e-4,
                  "published P sums for " + std::string(word));
      for (const auto& e : entries)
        if (e.word == word)
          c.check_abs(e.p(Label::kEntailed) + e.p(Label::kNotEntailed), 1.0, 1e-9,
                      "computed P sums for " + std::string(word));
    }
  }

  {
    Criterion c(10, "runtime: three-split audit with emission under 10 s");
    std::int64_t records = 0;
    for (const auto* s : splits) records += s->counts.total();
    c.check(records == 154607,
            "expected 154,607 records, audited " + std::to_string(records));
    c.check(seconds < 10.0, "audit took " + std::to_string(seconds) + " s");
    c.check(!rendered.empty(), "no report rendered");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f s for %lld records",
                  seconds, static_cast<long long>(records));
    c.note(buf);
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::string tier = "all";
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--tier") == 0 && i + 1 < argc)
      tier = argv[++i];
    else {
      std::fprintf(stderr, "usage: %s [--tier 1|2|all]\n", argv[0]);
      return 1;
    }
  }

  if (tier == "1" || tier == "all") {
    criterion_1_worked_example();
    criterion_2_chi_square_numerics();
    criterion_3_oracle_equivalence();
    criterion_4_property_suite();
  }
  if (tier == "2" || tier == "all") run_tier2();

  std::printf("acceptance: %d passed, %d failed, %d skipped\n", g_pass, g_fail, g_skip);
  if (g_fail > 0) return 1;
  if (tier == "2" && g_pass == 0 && g_skip > 0) return 77;  // ctest SKIP_RETURN_CODE
  return 0;
}
