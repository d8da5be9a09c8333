#pragma once

// Lexicon-and-rule sentiment scoring (VADER rule set).
//
// Scores are comparable with the reference Python analyzer: tokenization,
// rule order and constants mirror it, including its quirks, because the
// test-suite checks parity sentence by sentence.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace proxyllm::sentiment {

struct SentimentResult {
  double negative = 0.0;
  double neutral = 0.0;
  double positive = 0.0;
  double compound = 0.0;

  bool operator==(const SentimentResult&) const = default;
};

class LexiconError : public std::runtime_error {
 public:
  enum class Kind { Io, Empty };

  LexiconError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Heterogeneous-lookup hash so string_view probes do not allocate.
struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

template <typename V>
using StringMap = std::unordered_map<std::string, V, StringHash, std::equal_to<>>;
using StringSet = std::unordered_set<std::string, StringHash, std::equal_to<>>;

// Immutable after loading; share one instance across threads.
class Lexicon {
 public:
  // `token` must already be lowercased.
  std::optional<double> valence(std::string_view token) const {
    auto it = entries_.find(token);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(std::string_view token) const { return entries_.contains(token); }

  // Number of distinct tokens read from the source (mixed-case ones included).
  std::size_t entry_count() const noexcept { return entry_count_; }
  // Tokens reachable through lookup.
  std::size_t lookup_size() const noexcept { return entries_.size(); }
  std::size_t skipped_lines() const noexcept { return skipped_lines_; }

  const StringMap<double>& boosters() const noexcept { return boosters_; }
  const StringSet& negations() const noexcept { return negations_; }
  const StringMap<double>& special_cases() const noexcept { return special_cases_; }
  const std::string& contrastive_marker() const noexcept { return contrastive_marker_; }

  // Emoji code point (UTF-8) -> textual description.
  const StringMap<std::string>& emoji_descriptions() const noexcept { return emojis_; }
  void set_emoji_descriptions(StringMap<std::string> table) { emojis_ = std::move(table); }

 private:
  friend Lexicon load_lexicon(std::istream& source);

  StringMap<double> entries_;
  StringMap<double> boosters_;
  StringSet negations_;
  StringMap<double> special_cases_;
  StringMap<std::string> emojis_;
  std::string contrastive_marker_ = "but";
  std::size_t entry_count_ = 0;
  std::size_t skipped_lines_ = 0;
};

// Reads `token<TAB>mean<TAB>stddev<TAB>ratings` lines; only the first two
// fields are used. Lines whose second field is not a finite real are skipped
// and counted. Booster and negation tables come from the built-in rule set.
Lexicon load_lexicon(std::istream& source);
Lexicon load_lexicon_file(const std::filesystem::path& path);

// `emoji<TAB>description` lines. Only single-code-point keys can ever match.
StringMap<std::string> load_emoji_descriptions(std::istream& source);
StringMap<std::string> load_emoji_descriptions_file(const std::filesystem::path& path);

struct RuleToggles {
  bool emoji = true;
  bool idioms = true;
};

// raw / sqrt(raw^2 + 15), clamped to [-1, 1].
double normalize(double raw_sum);

SentimentResult analyze(std::string_view text, const Lexicon& lexicon,
                        const RuleToggles& rules = {});

// Batch kernels. analyze_batch fans out with OpenMP; analyze_batch_serial is
// the single-threaded reference kept for tests and benchmarks. Both return
// results in input order and are bit-identical.
std::vector<SentimentResult> analyze_batch(std::span<const std::string> texts,
                                           const Lexicon& lexicon,
                                           const RuleToggles& rules = {});
std::vector<SentimentResult> analyze_batch_serial(std::span<const std::string> texts,
                                                  const Lexicon& lexicon,
                                                  const RuleToggles& rules = {});

}  // namespace proxyllm::sentiment
