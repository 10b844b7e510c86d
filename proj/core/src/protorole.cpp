#include "nliaudit/protorole.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "nliaudit/errors.hpp"

namespace nliaudit {

namespace {

constexpr std::array<ProtoRole, kProtoRoleCount> kAllRoles = {
    ProtoRole::kInstigation,       ProtoRole::kVolition,
    ProtoRole::kAwareness,         ProtoRole::kSentient,
    ProtoRole::kChangeOfLocation,  ProtoRole::kExistsAsPhysical,
    ProtoRole::kExistedBefore,     ProtoRole::kExistedDuring,
    ProtoRole::kExistedAfter,      ProtoRole::kChangeOfPossession,
    ProtoRole::kChangeOfState,     ProtoRole::kStationary,
    ProtoRole::kLocationOfEvent,   ProtoRole::kPhysicalContact,
    ProtoRole::kWasUsed,           ProtoRole::kPredChangedArg,
};

constexpr std::array<std::string_view, kProtoRoleCount> kRoleIds = {
    "instigation",        "volition",       "awareness",          "sentient",
    "change_of_location", "exists_as_physical", "existed_before", "existed_during",
    "existed_after",      "change_of_possession", "change_of_state", "stationary",
    "location_of_event",  "physical_contact", "was_used",         "pred_changed_arg",
};

constexpr std::array<std::string_view, kProtoRoleCount> kRoleDisplayNames = {
    "Instigation",        "Volition",          "Awareness",          "Sentient",
    "Change of location", "Exists as physical", "Existed before",    "Existed during",
    "Existed after",      "Change of possession", "Change of state", "Stationary",
    "Location of event",  "Physical contact",  "Was used",           "Pred changed arg",
};

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::span<const ProtoRole> all_proto_roles() { return kAllRoles; }

std::string_view role_id(ProtoRole r) { return kRoleIds[role_index(r)]; }

std::string_view role_display_name(ProtoRole r) {
  return kRoleDisplayNames[role_index(r)];
}

std::optional<ProtoRole> parse_role(std::string_view raw) {
  std::string s = ascii_lower(trim(raw));
  for (char& c : s)
    if (c == ' ' || c == '-') c = '_';
  for (std::size_t i = 0; i < kProtoRoleCount; ++i)
    if (s == kRoleIds[i]) return kAllRoles[i];
  return std::nullopt;
}

std::vector<RoleRule> default_rules() {
  // Longest-literal-first: "caused a change in" must outrank the two-cue
  // instigation rule so the pred-changed-arg template never tags as
  // instigation.
  return {
      {1, ProtoRole::kPredChangedArg, {"caused a change in"}},
      {2, ProtoRole::kInstigation, {"caused the", "to happen"}},
      {3, ProtoRole::kVolition, {"chose to be involved"}},
      {4, ProtoRole::kAwareness, {"aware of being involved"}},
      {5, ProtoRole::kChangeOfLocation, {"changed location"}},
      {6, ProtoRole::kExistsAsPhysical, {"existed as a physical object"}},
      {7, ProtoRole::kExistedBefore, {"existed before"}},
      {8, ProtoRole::kExistedDuring, {"existed during"}},
      {9, ProtoRole::kExistedAfter, {"existed after"}},
      {10, ProtoRole::kChangeOfPossession, {"changed possession"}},
      {11, ProtoRole::kChangeOfState, {"altered or somehow changed"}},
      {12, ProtoRole::kStationary, {"stationary"}},
      {13, ProtoRole::kLocationOfEvent, {"described the location"}},
      {14, ProtoRole::kPhysicalContact, {"made physical contact"}},
      {15, ProtoRole::kWasUsed, {"used in carrying out"}},
      {16, ProtoRole::kSentient, {"sentient"}},
  };
}

namespace {

void validate_rules(const std::vector<RoleRule>& rules, std::string_view source) {
  std::set<int> ranks;
  std::array<bool, kProtoRoleCount> covered{};
  for (const auto& rule : rules) {
    if (!ranks.insert(rule.precedence).second)
      throw ConfigError("protorole", std::string(source) + ": duplicate precedence rank " +
                                         std::to_string(rule.precedence));
    if (rule.cues.empty())
      throw ConfigError("protorole", std::string(source) + ": rule for " +
                                         std::string(role_id(rule.role)) + " has no cues");
    covered[role_index(rule.role)] = true;
  }
  for (std::size_t i = 0; i < kProtoRoleCount; ++i)
    if (!covered[i])
      throw ConfigError("protorole", std::string(source) + ": no rule covers role " +
                                         std::string(kRoleIds[i]));
}

}  // namespace

std::vector<RoleRule> parse_rules(std::istream& in, std::string_view source) {
  std::vector<RoleRule> rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;

    auto where = [&] { return std::string(source) + ":" + std::to_string(line_no); };

    std::size_t tab1 = sv.find('\t');
    std::size_t tab2 = tab1 == std::string_view::npos ? std::string_view::npos
                                                      : sv.find('\t', tab1 + 1);
    if (tab2 == std::string_view::npos)
      throw ConfigError("protorole", where() + ": expected precedence<TAB>role<TAB>cues");

    RoleRule rule;
    try {
      rule.precedence = std::stoi(std::string(trim(sv.substr(0, tab1))));
    } catch (const std::exception&) {
      throw ConfigError("protorole", where() + ": bad precedence rank");
    }
    auto role = parse_role(sv.substr(tab1 + 1, tab2 - tab1 - 1));
    if (!role)
      throw ConfigError("protorole", where() + ": unknown role \"" +
                                         std::string(trim(sv.substr(tab1 + 1, tab2 - tab1 - 1))) +
                                         "\"");
    rule.role = *role;

    std::string_view cues = sv.substr(tab2 + 1);
    std::size_t start = 0;
    while (true) {
      std::size_t bar = cues.find('|', start);
      std::string_view cue = trim(cues.substr(start, bar - start));
      if (!cue.empty()) rule.cues.push_back(ascii_lower(cue));
      if (bar == std::string_view::npos) break;
      start = bar + 1;
    }
    if (rule.cues.empty())
      throw ConfigError("protorole", where() + ": rule has no cue phrases");
    rules.push_back(std::move(rule));
  }
  validate_rules(rules, source);
  return rules;
}

std::vector<RoleRule> load_rules(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("protorole", "cannot read rules file " + path.string());
  return parse_rules(in, path.string());
}

std::optional<ProtoRole> tag_hypothesis(std::string_view hypothesis,
                                        std::span<const RoleRule> rules) {
  std::string lowered = ascii_lower(hypothesis);
  const RoleRule* best = nullptr;
  for (const auto& rule : rules) {
    if (best && rule.precedence >= best->precedence) continue;
    bool all = true;
    for (const auto& cue : rule.cues) {
      // loaders store cues lowercased already; hand-built vectors may not be
      if (lowered.find(ascii_lower(cue)) == std::string::npos) {
        all = false;
        break;
      }
    }
    if (all) best = &rule;
  }
  if (!best) return std::nullopt;
  return best->role;
}

TaggedSplit tag_split(const DatasetSplit& split, std::span<const RoleRule> rules,
                      bool prefer_metadata) {
  TaggedSplit tagged;
  tagged.split_name = split.name;
  tagged.tags.reserve(split.size());
  tagged.labels.reserve(split.size());

  for (const auto& rec : split.records) {
    std::optional<ProtoRole> tag;
    bool meta_consulted = false;
    if (prefer_metadata && rec.proto_role_meta) {
      meta_consulted = true;
      tag = parse_role(*rec.proto_role_meta);
      if (!tag) ++tagged.unknown_metadata;
    }
    // Unparseable metadata is counted as UNMATCHED rather than falling back
    // to rules, so the report surfaces the bad annotations.
    if (!tag && !meta_consulted) tag = tag_hypothesis(rec.hypothesis, rules);

    tagged.tags.push_back(tag);
    tagged.labels.push_back(rec.label);
    if (tag)
      ++tagged.role_counts[role_index(*tag)];
    else
      ++tagged.unmatched;
  }
  return tagged;
}

}  // namespace nliaudit
