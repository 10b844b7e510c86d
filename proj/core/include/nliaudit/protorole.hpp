#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nliaudit/corpus.hpp"

namespace nliaudit {

// The 16 proto-role properties, in the fixed inventory order used everywhere
// a per-role table is emitted.
enum class ProtoRole : std::uint8_t {
  kInstigation = 0,
  kVolition,
  kAwareness,
  kSentient,
  kChangeOfLocation,
  kExistsAsPhysical,
  kExistedBefore,
  kExistedDuring,
  kExistedAfter,
  kChangeOfPossession,
  kChangeOfState,
  kStationary,
  kLocationOfEvent,
  kPhysicalContact,
  kWasUsed,
  kPredChangedArg,
};

inline constexpr std::size_t kProtoRoleCount = 16;

constexpr std::size_t role_index(ProtoRole r) { return static_cast<std::size_t>(r); }

// All roles in inventory order.
std::span<const ProtoRole> all_proto_roles();

std::string_view role_id(ProtoRole r);            // "change_of_possession"
std::string_view role_display_name(ProtoRole r);  // "Change of possession"

// Tolerant parse: case-insensitive, spaces and hyphens treated as underscores.
std::optional<ProtoRole> parse_role(std::string_view raw);

// One tagging rule: all cue phrases must occur (case-insensitive substring on
// the raw hypothesis) for the rule to fire. Lower precedence value wins.
struct RoleRule {
  int precedence = 0;
  ProtoRole role = ProtoRole::kInstigation;
  std::vector<std::string> cues;
};

// Built-in rule table transcribed from the role property templates; identical
// to core/data/default_rules.tsv, which is the overridable on-disk form.
std::vector<RoleRule> default_rules();

// Rules file: one rule per line, `precedence<TAB>role<TAB>cue1[|cue2...]`,
// UTF-8, `#` comments. Rejects duplicate precedence ranks and tables that
// leave any role without a rule.
std::vector<RoleRule> parse_rules(std::istream& in, std::string_view source = "<stream>");
std::vector<RoleRule> load_rules(const std::filesystem::path& path);

struct TaggedSplit {
  std::string split_name;
  // Parallel arrays in record order; tag is empty for UNMATCHED records.
  std::vector<std::optional<ProtoRole>> tags;
  std::vector<Label> labels;
  std::array<std::int64_t, kProtoRoleCount> role_counts{};
  std::int64_t unmatched = 0;
  // Records whose proto_role_meta parsed to no known role (counted as
  // UNMATCHED when prefer_metadata is set, never fatal).
  std::int64_t unknown_metadata = 0;

  std::size_t size() const { return tags.size(); }
  std::int64_t matched() const {
    return static_cast<std::int64_t>(tags.size()) - unmatched;
  }
};

// Returns the role of the highest-precedence (lowest rank) rule whose cue
// phrases all occur in the hypothesis; empty if none match. Pure and
// deterministic; rule order in the span does not matter.
std::optional<ProtoRole> tag_hypothesis(std::string_view hypothesis,
                                        std::span<const RoleRule> rules);

// Assigns every record exactly one tag (role or UNMATCHED). When
// prefer_metadata is set and proto_role_meta parses to a known role the
// metadata wins over rules; unparseable metadata counts as UNMATCHED and is
// reported via unknown_metadata.
TaggedSplit tag_split(const DatasetSplit& split, std::span<const RoleRule> rules,
                      bool prefer_metadata = false);

}  // namespace nliaudit
