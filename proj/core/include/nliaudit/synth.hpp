#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "nliaudit/corpus.hpp"
#include "nliaudit/protorole.hpp"

namespace nliaudit {

struct SynthRole {
  ProtoRole role = ProtoRole::kInstigation;
  std::int64_t count = 0;
  double entailed_rate = 0.5;  // fraction of the role's records labeled entailed
};

// A vocabulary word sprinkled into hypotheses. entailed_weight skews which
// label's hypotheses receive it (0 = only not-entailed, 1 = only entailed);
// frequency scales how often it is placed at all.
struct SynthWord {
  std::string word;
  double entailed_weight = 0.5;
  double frequency = 1.0;
};

struct SynthSpec {
  std::vector<SynthRole> roles;
  std::vector<SynthWord> vocabulary;
  std::uint64_t seed = 0;
};

// JSON spec file: {"seed": N, "roles": [{"role": ..., "count": ...,
// "entailed_rate": ...}], "vocabulary": [{"word": ..., "entailed_weight": ...,
// "frequency": ...}]}.
SynthSpec load_synth_spec(const std::filesystem::path& path);

// Builds a split whose hypotheses embed each role's cue template plus the
// sampled vocabulary. Per-role label counts are allocated exactly
// (llround(rate * count) entailed records first, never sampled); the seed
// governs word placement only, via mt19937_64 mapped to doubles directly
// (no library distributions), so identical specs produce byte-identical
// splits on every platform.
DatasetSplit generate_synthetic(const SynthSpec& spec, std::string_view name = "train");

// generate + save as TSV.
void write_synthetic(const SynthSpec& spec, const std::filesystem::path& path,
                     std::string_view name = "train");

}  // namespace nliaudit
