#include "nliaudit/synth.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "nliaudit/errors.hpp"
#include "json.hpp"

namespace nliaudit {

namespace {

// Declarative forms of the role property templates; each one contains its
// role's cue phrase(s) and no other rule's.
constexpr std::array<std::string_view, kProtoRoleCount> kTemplates = {
    "The argument caused the predicate to happen",
    "The argument chose to be involved in the predicate",
    "The argument was aware of being involved in the predicate",
    "The argument was sentient",
    "The argument changed location during the predicate",
    "The argument existed as a physical object",
    "The argument existed before the predicate began",
    "The argument existed during the predicate",
    "The argument existed after the predicate stopped",
    "The argument changed possession during the predicate",
    "The argument was altered or somehow changed during or by the end of the predicate",
    "The argument was stationary during the predicate",
    "The argument described the location of the predicate",
    "The argument made physical contact with someone or something involved in the predicate",
    "The argument was used in carrying out the predicate",
    "The predicate caused a change in the argument",
};

// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
// unlike std::uniform_real_distribution.
double next_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void validate_spec(const SynthSpec& spec) {
  if (spec.roles.empty())
    throw ConfigError("synth", "spec has no roles");
  for (const auto& r : spec.roles) {
    if (r.count < 0)
      throw ConfigError("synth", "negative count for role " + std::string(role_id(r.role)));
    if (!(r.entailed_rate >= 0.0 && r.entailed_rate <= 1.0))
      throw ConfigError("synth", "entailed_rate outside [0,1] for role " +
                                     std::string(role_id(r.role)));
  }
  for (const auto& w : spec.vocabulary) {
    if (w.word.empty())
      throw ConfigError("synth", "empty vocabulary word");
    if (!(w.entailed_weight >= 0.0 && w.entailed_weight <= 1.0))
      throw ConfigError("synth", "entailed_weight outside [0,1] for \"" + w.word + "\"");
    if (!(w.frequency >= 0.0 && w.frequency <= 1.0))
      throw ConfigError("synth", "frequency outside [0,1] for \"" + w.word + "\"");
  }
}

}  // namespace

SynthSpec load_synth_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("synth", "cannot read spec " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object())
    throw ConfigError("synth", "spec " + path.string() + " is not a JSON object");

  SynthSpec spec;
  spec.seed = j.value("seed", std::uint64_t{0});
  for (const auto& jr : j.value("roles", nlohmann::json::array())) {
    SynthRole role;
    auto parsed = parse_role(jr.value("role", std::string{}));
    if (!parsed)
      throw ConfigError("synth", "unknown role \"" + jr.value("role", std::string{}) + "\"");
    role.role = *parsed;
    role.count = jr.value("count", std::int64_t{0});
    role.entailed_rate = jr.value("entailed_rate", 0.5);
    spec.roles.push_back(role);
  }
  for (const auto& jw : j.value("vocabulary", nlohmann::json::array())) {
    SynthWord word;
    word.word = jw.value("word", std::string{});
    word.entailed_weight = jw.value("entailed_weight", 0.5);
    word.frequency = jw.value("frequency", 1.0);
    spec.vocabulary.push_back(std::move(word));
  }
  return spec;
}

DatasetSplit generate_synthetic(const SynthSpec& spec, std::string_view name) {
  validate_spec(spec);

  DatasetSplit split;
  split.name = std::string(name);
  split.kind = split_kind_from_name(name);

  std::mt19937_64 rng(spec.seed);
  for (const auto& role_spec : spec.roles) {
    const std::int64_t entailed = std::llround(role_spec.entailed_rate *
                                               static_cast<double>(role_spec.count));
    for (std::int64_t i = 0; i < role_spec.count; ++i) {
      NliRecord rec;
      rec.label = i < entailed ? Label::kEntailed : Label::kNotEntailed;
      rec.premise = "The event took place";
      std::string hyp(kTemplates[role_index(role_spec.role)]);
      for (const auto& word : spec.vocabulary) {
        // One draw per (record, word) pair whether or not the word lands, so
        // placement of one word never shifts another's stream.
        double u = next_double(rng);
        double weight = rec.label == Label::kEntailed ? word.entailed_weight
                                                      : 1.0 - word.entailed_weight;
        if (u < word.frequency * weight) {
          hyp += ' ';
          hyp += word.word;
        }
      }
      hyp += '.';
      rec.hypothesis = std::move(hyp);
      split.records.push_back(std::move(rec));
    }
  }

  if (split.records.empty())
    throw ConfigError("synth", "spec generates zero records");
  return split;
}

void write_synthetic(const SynthSpec& spec, const std::filesystem::path& path,
                     std::string_view name) {
  DatasetSplit split = generate_synthetic(spec, name);
  save_split(split, path, SplitFormat::kTsv);
}

}  // namespace nliaudit
