#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "nliaudit/corpus.hpp"

namespace nliaudit {

// Lowercased tokens, split on whitespace, leading/trailing punctuation
// stripped, empty tokens dropped. Interior punctuation is preserved
// ("stock--stock" stays one token).
std::vector<std::string> tokenize(std::string_view hypothesis);

// Presence counts each word once per hypothesis it occurs in (the shared
// per-word denominator behind P(l|w)); token mode counts every occurrence
// and exists for sensitivity analysis.
enum class CountingMode : std::uint8_t { kPresence, kToken };

std::optional<CountingMode> parse_counting_mode(std::string_view name);
std::string_view to_string(CountingMode mode);

struct LexicalEntry {
  std::string word;
  std::array<std::int64_t, kLabelCount> freq_per_label{};
  std::int64_t total_freq = 0;
  std::array<double, kLabelCount> p_label_given_word{};

  std::int64_t freq(Label l) const { return freq_per_label[label_index(l)]; }
  double p(Label l) const { return p_label_given_word[label_index(l)]; }
  double max_p() const { return std::max(p_label_given_word[0], p_label_given_word[1]); }
};

using StopList = std::unordered_set<std::string>;

// One token per line, UTF-8, '#' comments; tokens are lowercased.
StopList load_stop_list(const std::filesystem::path& path);

// One entry per distinct token, sorted by word, with
// p_label_given_word[l] = freq_per_label[l] / total_freq.
std::vector<LexicalEntry> word_label_stats(const DatasetSplit& split,
                                           CountingMode mode = CountingMode::kPresence,
                                           const StopList* stop_list = nullptr);

// Entries with freq_per_label[label] >= min_freq, sorted descending on that
// frequency, ties broken lexicographically by word; first k returned.
std::vector<LexicalEntry> top_k_by_label(std::span<const LexicalEntry> entries, Label label,
                                         std::size_t k, std::int64_t min_freq);

}  // namespace nliaudit
