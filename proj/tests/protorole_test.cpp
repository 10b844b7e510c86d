#include "nliaudit/protorole.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "nliaudit/errors.hpp"
#include "test_util.hpp"

using namespace nliaudit;

TEST_CASE("role inventory is the fixed 16 in order") {
  auto roles = all_proto_roles();
  REQUIRE(roles.size() == 16);
  CHECK(roles.front() == ProtoRole::kInstigation);
  CHECK(roles.back() == ProtoRole::kPredChangedArg);
  CHECK(role_id(ProtoRole::kChangeOfPossession) == "change_of_possession");
  CHECK(role_display_name(ProtoRole::kWasUsed) == "Was used");
}

TEST_CASE("role parsing is tolerant of case, spaces, hyphens") {
  CHECK(parse_role("stationary") == ProtoRole::kStationary);
  CHECK(parse_role("Change of location") == ProtoRole::kChangeOfLocation);
  CHECK(parse_role("pred-changed-arg") == ProtoRole::kPredChangedArg);
  CHECK(parse_role(" EXISTS_AS_PHYSICAL ") == ProtoRole::kExistsAsPhysical);
  CHECK_FALSE(parse_role("protagonist").has_value());
}

TEST_CASE("tag_hypothesis follows the default cue table") {
  auto rules = default_rules();
  CHECK(tag_hypothesis("The cat was sentient.", rules) == ProtoRole::kSentient);
  CHECK(tag_hypothesis("The increasing caused a change in 14 members", rules) ==
        ProtoRole::kPredChangedArg);
  CHECK_FALSE(tag_hypothesis("xyzzy", rules).has_value());
  CHECK(tag_hypothesis("The storm caused the flood to happen.", rules) ==
        ProtoRole::kInstigation);
  CHECK(tag_hypothesis("THE CROWD CHANGED LOCATION DURING THE MARCH", rules) ==
        ProtoRole::kChangeOfLocation);
}

TEST_CASE("pred_changed_arg outranks instigation whenever its cue occurs") {
  auto rules = default_rules();
  // contains both the instigation cues and the pred_changed_arg cue
  CHECK(tag_hypothesis("It caused the shift to happen and caused a change in tone", rules) ==
        ProtoRole::kPredChangedArg);

  std::mt19937 rng(99);
  const char* fillers[] = {"alpha", "beta", "gamma", "delta"};
  for (int i = 0; i < 50; ++i) {
    std::string h = fillers[rng() % 4];
    h += " caused a change in ";
    h += fillers[rng() % 4];
    if (rng() % 2) h += " caused the thing to happen";
    CHECK(tag_hypothesis(h, rules) == ProtoRole::kPredChangedArg);
  }
}

TEST_CASE("tagging is deterministic and per-record") {
  auto rules = default_rules();
  DatasetSplit split = testutil::split_of({
      testutil::record("A existed before B.", Label::kEntailed),
      testutil::record("A was stationary here.", Label::kNotEntailed),
      testutil::record("gibberish", Label::kEntailed),
      testutil::record("B made physical contact with A.", Label::kNotEntailed),
  });
  TaggedSplit tagged = tag_split(split, rules);
  REQUIRE(tagged.size() == 4);
  CHECK(tagged.tags[0] == ProtoRole::kExistedBefore);
  CHECK(tagged.tags[1] == ProtoRole::kStationary);
  CHECK_FALSE(tagged.tags[2].has_value());
  CHECK(tagged.tags[3] == ProtoRole::kPhysicalContact);
  CHECK(tagged.unmatched == 1);

  // permuting records permutes assignments identically
  DatasetSplit permuted = split;
  std::reverse(permuted.records.begin(), permuted.records.end());
  TaggedSplit tagged2 = tag_split(permuted, rules);
  for (std::size_t i = 0; i < split.size(); ++i)
    CHECK(tagged.tags[i] == tagged2.tags[split.size() - 1 - i]);
  CHECK(tagged.role_counts == tagged2.role_counts);
}

TEST_CASE("per-role counts plus unmatched equal the record count") {
  auto rules = default_rules();
  DatasetSplit split = testutil::split_of({
      testutil::record("A changed possession.", Label::kEntailed),
      testutil::record("B changed possession twice.", Label::kNotEntailed),
      testutil::record("C changed possession again.", Label::kEntailed),
      testutil::record("nothing here", Label::kEntailed),
  });
  TaggedSplit tagged = tag_split(split, rules);
  CHECK(tagged.role_counts[role_index(ProtoRole::kChangeOfPossession)] == 3);
  std::int64_t sum = tagged.unmatched;
  for (auto c : tagged.role_counts) sum += c;
  CHECK(sum == static_cast<std::int64_t>(split.size()));
}

TEST_CASE("metadata wins over rules when prefer_metadata is set") {
  auto rules = default_rules();
  NliRecord rec = testutil::record("ARG existed before", Label::kEntailed);
  rec.proto_role_meta = "stationary";
  DatasetSplit split = testutil::split_of({rec});

  TaggedSplit with_meta = tag_split(split, rules, /*prefer_metadata=*/true);
  CHECK(with_meta.tags[0] == ProtoRole::kStationary);

  TaggedSplit without_meta = tag_split(split, rules, /*prefer_metadata=*/false);
  CHECK(without_meta.tags[0] == ProtoRole::kExistedBefore);
}

TEST_CASE("unparseable metadata counts as unmatched, not fatal") {
  auto rules = default_rules();
  NliRecord rec = testutil::record("ARG existed before", Label::kEntailed);
  rec.proto_role_meta = "no-such-role";
  DatasetSplit split = testutil::split_of({rec});
  TaggedSplit tagged = tag_split(split, rules, /*prefer_metadata=*/true);
  CHECK_FALSE(tagged.tags[0].has_value());
  CHECK(tagged.unmatched == 1);
  CHECK(tagged.unknown_metadata == 1);
}

TEST_CASE("rules file parses comments, multi-cue rules, and rejects bad tables") {
  std::istringstream good(
      "# comment\n"
      "\n"
      "1\tpred_changed_arg\tcaused a change in\n"
      "2\tinstigation\tcaused the|to happen\n"
      "3\tvolition\tchose to be involved\n"
      "4\tawareness\taware of being involved\n"
      "5\tchange_of_location\tchanged location\n"
      "6\texists_as_physical\texisted as a physical object\n"
      "7\texisted_before\texisted before\n"
      "8\texisted_during\texisted during\n"
      "9\texisted_after\texisted after\n"
      "10\tchange_of_possession\tchanged possession\n"
      "11\tchange_of_state\taltered or somehow changed\n"
      "12\tstationary\tstationary\n"
      "13\tlocation_of_event\tdescribed the location\n"
      "14\tphysical_contact\tmade physical contact\n"
      "15\twas_used\tused in carrying out\n"
      "16\tsentient\tsentient\n");
  auto rules = parse_rules(good);
  REQUIRE(rules.size() == 16);
  CHECK(rules[1].cues == std::vector<std::string>{"caused the", "to happen"});

  std::istringstream dup("1\tstationary\tstationary\n1\tsentient\tsentient\n");
  CHECK_THROWS_AS(parse_rules(dup), ConfigError);

  std::istringstream incomplete("1\tstationary\tstationary\n");
  CHECK_THROWS_WITH_AS(parse_rules(incomplete), doctest::Contains("no rule covers"),
                       ConfigError);

  std::istringstream bad_role("1\tprotagonist\tfoo\n");
  CHECK_THROWS_AS(parse_rules(bad_role), ConfigError);

  std::istringstream bad_shape("1 stationary stationary\n");
  CHECK_THROWS_AS(parse_rules(bad_shape), ConfigError);

  CHECK_THROWS_AS(load_rules("/nonexistent/rules.tsv"), ConfigError);
}

#ifdef NLIAUDIT_DEFAULT_RULES_FILE
TEST_CASE("shipped default rules file matches the built-in table") {
  auto from_file = load_rules(NLIAUDIT_DEFAULT_RULES_FILE);
  auto builtin = default_rules();
  REQUIRE(from_file.size() == builtin.size());
  for (std::size_t i = 0; i < builtin.size(); ++i) {
    CHECK(from_file[i].precedence == builtin[i].precedence);
    CHECK(from_file[i].role == builtin[i].role);
    CHECK(from_file[i].cues == builtin[i].cues);
  }
}
#endif
