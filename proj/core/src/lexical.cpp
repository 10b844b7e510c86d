#include "nliaudit/lexical.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include "nliaudit/errors.hpp"

namespace nliaudit {

std::vector<std::string> tokenize(std::string_view hypothesis) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  const std::size_t n = hypothesis.size();
  while (i < n) {
    while (i < n && std::isspace(static_cast<unsigned char>(hypothesis[i]))) ++i;
    std::size_t start = i;
    while (i < n && !std::isspace(static_cast<unsigned char>(hypothesis[i]))) ++i;
    if (i == start) continue;

    std::size_t lo = start, hi = i;  // [lo, hi) after edge-punctuation strip
    while (lo < hi && std::ispunct(static_cast<unsigned char>(hypothesis[lo]))) ++lo;
    while (hi > lo && std::ispunct(static_cast<unsigned char>(hypothesis[hi - 1]))) --hi;
    if (lo == hi) continue;

    std::string token(hypothesis.substr(lo, hi - lo));
    std::transform(token.begin(), token.end(), token.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    tokens.push_back(std::move(token));
  }
  return tokens;
}

std::optional<CountingMode> parse_counting_mode(std::string_view name) {
  if (name == "presence") return CountingMode::kPresence;
  if (name == "token") return CountingMode::kToken;
  return std::nullopt;
}

std::string_view to_string(CountingMode mode) {
  return mode == CountingMode::kPresence ? "presence" : "token";
}

StopList load_stop_list(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("lexical", "cannot read stop-list " + path.string());
  StopList stop;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view sv = line;
    while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.front()))) sv.remove_prefix(1);
    while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.back()))) sv.remove_suffix(1);
    if (sv.empty() || sv.front() == '#') continue;
    std::string token(sv);
    std::transform(token.begin(), token.end(), token.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    stop.insert(std::move(token));
  }
  return stop;
}

std::vector<LexicalEntry> word_label_stats(const DatasetSplit& split, CountingMode mode,
                                           const StopList* stop_list) {
  if (split.records.empty())
    throw DataError("lexical", "word statistics of an empty split");

  // std::map keeps the output sorted by word, so shard-and-merge variants of
  // this loop land on the identical entry order.
  std::map<std::string, std::array<std::int64_t, kLabelCount>> counts;
  std::vector<std::string> tokens;
  for (const auto& rec : split.records) {
    tokens = tokenize(rec.hypothesis);
    if (mode == CountingMode::kPresence) {
      std::sort(tokens.begin(), tokens.end());
      tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    }
    for (auto& token : tokens) {
      if (stop_list && stop_list->contains(token)) continue;
      ++counts[std::move(token)][label_index(rec.label)];
    }
  }

  std::vector<LexicalEntry> entries;
  entries.reserve(counts.size());
  for (auto& [word, freq] : counts) {
    LexicalEntry e;
    e.word = word;
    e.freq_per_label = freq;
    e.total_freq = freq[0] + freq[1];
    for (std::size_t l = 0; l < kLabelCount; ++l)
      e.p_label_given_word[l] =
          static_cast<double>(freq[l]) / static_cast<double>(e.total_freq);
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<LexicalEntry> top_k_by_label(std::span<const LexicalEntry> entries, Label label,
                                         std::size_t k, std::int64_t min_freq) {
  if (k < 1)
    throw ConfigError("lexical", "top-k requires k >= 1");
  std::vector<LexicalEntry> selected;
  for (const auto& e : entries)
    if (e.freq(label) >= min_freq) selected.push_back(e);
  std::sort(selected.begin(), selected.end(),
            [label](const LexicalEntry& a, const LexicalEntry& b) {
              if (a.freq(label) != b.freq(label)) return a.freq(label) > b.freq(label);
              return a.word < b.word;
            });
  if (selected.size() > k) selected.resize(k);
  return selected;
}

}  // namespace nliaudit
