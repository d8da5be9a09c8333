#include "proxyllm/sentiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>

#include "text_util.hpp"

namespace proxyllm::sentiment {

namespace {

constexpr double kBoosterIncrement = 0.293;
constexpr double kCapsIncrement = 0.733;
constexpr double kNegationScalar = -0.74;
constexpr double kExclamationIncrement = 0.292;
constexpr int kMaxExclamations = 4;
constexpr double kQuestionIncrement = 0.18;
constexpr double kQuestionCap = 0.96;
constexpr double kNormalizationAlpha = 15.0;

constexpr std::string_view kNegations[] = {
    "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt",
    "ain't", "aren't", "can't", "couldn't", "daren't", "didn't", "doesn't",
    "dont", "hadnt", "hasnt", "havent", "isnt", "mightnt", "mustnt", "neither",
    "don't", "hadn't", "hasn't", "haven't", "isn't", "mightn't", "mustn't",
    "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing", "nowhere",
    "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent",
    "oughtn't", "shan't", "shouldn't", "uh-uh", "wasn't", "weren't",
    "without", "wont", "wouldnt", "won't", "wouldn't", "rarely", "seldom", "despite"};

constexpr std::string_view kIncrementBoosters[] = {
    "absolutely", "amazingly", "awfully", "completely", "considerable", "considerably",
    "decidedly", "deeply", "effing", "enormous", "enormously", "entirely", "especially",
    "exceptional", "exceptionally", "extreme", "extremely", "fabulously", "flipping",
    "flippin", "frackin", "fracking", "fricking", "frickin", "frigging", "friggin", "fully",
    "fuckin", "fucking", "fuggin", "fugging", "greatly", "hella", "highly", "hugely",
    "incredible", "incredibly", "intensely", "major", "majorly", "more", "most",
    "particularly", "purely", "quite", "really", "remarkably", "so", "substantially",
    "thoroughly", "total", "totally", "tremendous", "tremendously", "uber", "unbelievably",
    "unusually", "utter", "utterly", "very"};

constexpr std::string_view kDecrementBoosters[] = {
    "almost", "barely", "hardly", "just enough", "kind of", "kinda", "kindof", "kind-of",
    "less", "little", "marginal", "marginally", "occasional", "occasionally", "partly",
    "scarce", "scarcely", "slight", "slightly", "somewhat", "sort of", "sorta", "sortof",
    "sort-of"};

// Phrases containing lexicon words whose meaning overrides the word valence.
const std::pair<std::string_view, double> kSpecialCases[] = {
    {"the shit", 3.0}, {"the bomb", 3.0}, {"bad ass", 1.5}, {"badass", 1.5},
    {"bus stop", 0.0}, {"yeah right", -2.0}, {"kiss of death", -1.5},
    {"to die for", 3.0}, {"beating heart", 3.5}};

// string.punctuation
bool is_ascii_punct(char c) {
  return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') ||
         (c >= '{' && c <= '~');
}

// Python str.isupper() restricted to ASCII letters.
bool is_upper_word(std::string_view word) {
  bool cased = false;
  for (char c : word) {
    if (c >= 'a' && c <= 'z') return false;
    if (c >= 'A' && c <= 'Z') cased = true;
  }
  return cased;
}

struct Token {
  std::string raw;
  std::string lower;
  bool upper = false;
};

// Strips leading/trailing ASCII punctuation unless what remains is two code
// points or fewer, in which case the token is probably an emoticon and kept.
std::string_view strip_punctuation_if_word(std::string_view token) {
  std::size_t begin = 0;
  std::size_t end = token.size();
  while (begin < end && is_ascii_punct(token[begin])) ++begin;
  while (end > begin && is_ascii_punct(token[end - 1])) --end;
  const std::string_view stripped = token.substr(begin, end - begin);
  if (text::count_code_points(stripped) <= 2) return token;
  return stripped;
}

std::string replace_emojis(std::string_view input, const StringMap<std::string>& emojis) {
  std::string out;
  out.reserve(input.size());
  bool prev_space = true;
  for (std::size_t pos = 0; pos < input.size();) {
    const std::size_t len = text::code_point_length(input, pos);
    const std::string_view cp = input.substr(pos, len);
    auto it = emojis.find(cp);
    if (it != emojis.end()) {
      if (!prev_space) out.push_back(' ');
      out += it->second;
      prev_space = false;
    } else {
      out += cp;
      prev_space = cp == " ";
    }
    pos += len;
  }
  return out;
}

class Scorer {
 public:
  Scorer(const Lexicon& lexicon, const RuleToggles& rules, std::vector<Token> words)
      : lex_(lexicon), rules_(rules), words_(std::move(words)) {
    std::size_t caps = 0;
    for (const auto& w : words_) caps += w.upper ? 1 : 0;
    const std::size_t differential = words_.size() - caps;
    cap_differential_ = differential > 0 && differential < words_.size();
  }

  std::vector<double> valences() const {
    std::vector<double> sentiments;
    sentiments.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
      const std::string& lower = words_[i].lower;
      if (lex_.boosters().contains(lower)) {
        sentiments.push_back(0.0);
        continue;
      }
      if (i + 1 < words_.size() && lower == "kind" && words_[i + 1].lower == "of") {
        sentiments.push_back(0.0);
        continue;
      }
      sentiments.push_back(word_valence(i));
    }
    apply_contrast(sentiments);
    return sentiments;
  }

 private:
  const std::string& lw(std::size_t i) const { return words_[i].lower; }

  bool negated(std::string_view lower) const {
    return lex_.negations().contains(lower) || lower.find("n't") != std::string_view::npos;
  }

  double booster_scalar(const Token& word, double valence) const {
    auto it = lex_.boosters().find(word.lower);
    if (it == lex_.boosters().end()) return 0.0;
    double scalar = it->second;
    if (valence < 0) scalar *= -1;
    if (word.upper && cap_differential_) {
      scalar += valence > 0 ? kCapsIncrement : -kCapsIncrement;
    }
    return scalar;
  }

  double word_valence(std::size_t i) const {
    const Token& item = words_[i];
    const auto base = lex_.valence(item.lower);
    if (!base) return 0.0;
    double valence = *base;

    // "no" directly before another lexicon word acts as a negator, not a word.
    if (item.lower == "no" && i + 1 != words_.size() && lex_.contains(lw(i + 1))) {
      valence = 0.0;
    }
    if ((i > 0 && lw(i - 1) == "no") || (i > 1 && lw(i - 2) == "no") ||
        (i > 2 && lw(i - 3) == "no" && (lw(i - 1) == "or" || lw(i - 1) == "nor"))) {
      valence = *base * kNegationScalar;
    }

    if (item.upper && cap_differential_) {
      valence += valence > 0 ? kCapsIncrement : -kCapsIncrement;
    }

    for (std::size_t start = 0; start < 3; ++start) {
      if (i > start && !lex_.contains(lw(i - (start + 1)))) {
        double s = booster_scalar(words_[i - (start + 1)], valence);
        if (start == 1 && s != 0) s *= 0.95;
        if (start == 2 && s != 0) s *= 0.9;
        valence += s;
        valence = negation_check(valence, start, i);
        if (start == 2 && rules_.idioms) valence = idiom_check(valence, i);
      }
    }
    return least_check(valence, i);
  }

  double negation_check(double valence, std::size_t start, std::size_t i) const {
    if (start == 0) {
      if (negated(lw(i - 1))) valence *= kNegationScalar;
    } else if (start == 1) {
      if (lw(i - 2) == "never" && (lw(i - 1) == "so" || lw(i - 1) == "this")) {
        valence *= 1.25;
      } else if (lw(i - 2) == "without" && lw(i - 1) == "doubt") {
      } else if (negated(lw(i - 2))) {
        valence *= kNegationScalar;
      }
    } else {
      // Operator grouping matches the reference: (A && (B || C)) || D || E.
      if ((lw(i - 3) == "never" && (lw(i - 2) == "so" || lw(i - 2) == "this")) ||
          (lw(i - 1) == "so" || lw(i - 1) == "this")) {
        valence *= 1.25;
      } else if (lw(i - 3) == "without" && (lw(i - 2) == "doubt" || lw(i - 1) == "doubt")) {
      } else if (negated(lw(i - 3))) {
        valence *= kNegationScalar;
      }
    }
    return valence;
  }

  double idiom_check(double valence, std::size_t i) const {
    const auto join2 = [](const std::string& a, const std::string& b) { return a + ' ' + b; };
    const auto join3 = [](const std::string& a, const std::string& b, const std::string& c) {
      return a + ' ' + b + ' ' + c;
    };
    const std::string onezero = join2(lw(i - 1), lw(i));
    const std::string twoonezero = join3(lw(i - 2), lw(i - 1), lw(i));
    const std::string twoone = join2(lw(i - 2), lw(i - 1));
    const std::string threetwoone = join3(lw(i - 3), lw(i - 2), lw(i - 1));
    const std::string threetwo = join2(lw(i - 3), lw(i - 2));

    const auto& special = lex_.special_cases();
    for (const std::string* seq : {&onezero, &twoonezero, &twoone, &threetwoone, &threetwo}) {
      if (auto it = special.find(*seq); it != special.end()) {
        valence = it->second;
        break;
      }
    }
    if (words_.size() - 1 > i) {
      if (auto it = special.find(join2(lw(i), lw(i + 1))); it != special.end()) {
        valence = it->second;
      }
    }
    if (words_.size() - 1 > i + 1) {
      if (auto it = special.find(join3(lw(i), lw(i + 1), lw(i + 2))); it != special.end()) {
        valence = it->second;
      }
    }
    // Multi-word dampeners ("kind of", "sort of", "just enough").
    for (const std::string* gram : {&threetwoone, &threetwo, &twoone}) {
      if (auto it = lex_.boosters().find(*gram); it != lex_.boosters().end()) {
        valence += it->second;
      }
    }
    return valence;
  }

  double least_check(double valence, std::size_t i) const {
    if (i > 1 && !lex_.contains(lw(i - 1)) && lw(i - 1) == "least") {
      if (lw(i - 2) != "at" && lw(i - 2) != "very") valence *= kNegationScalar;
    } else if (i > 0 && !lex_.contains(lw(i - 1)) && lw(i - 1) == "least") {
      valence *= kNegationScalar;
    }
    return valence;
  }

  // Down-weights valences before the contrastive marker and up-weights those
  // after it. The reference locates each value with list.index(), i.e. the
  // first slot holding an equal value; reproduced as-is for parity.
  void apply_contrast(std::vector<double>& sentiments) const {
    std::size_t marker = words_.size();
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (lw(i) == lex_.contrastive_marker()) {
        marker = i;
        break;
      }
    }
    if (marker == words_.size()) return;
    for (std::size_t k = 0; k < sentiments.size(); ++k) {
      const double value = sentiments[k];
      const auto first = static_cast<std::size_t>(
          std::find(sentiments.begin(), sentiments.end(), value) - sentiments.begin());
      if (first < marker) {
        sentiments[first] = value * 0.5;
      } else if (first > marker) {
        sentiments[first] = value * 1.5;
      }
    }
  }

  const Lexicon& lex_;
  const RuleToggles& rules_;
  std::vector<Token> words_;
  bool cap_differential_ = false;
};

double punctuation_amplifier(std::string_view text) {
  const auto exclamations = std::min<std::ptrdiff_t>(
      std::count(text.begin(), text.end(), '!'), kMaxExclamations);
  const auto questions = std::count(text.begin(), text.end(), '?');
  double question_amp = 0.0;
  if (questions > 1) {
    question_amp = questions <= 3 ? static_cast<double>(questions) * kQuestionIncrement
                                  : kQuestionCap;
  }
  return static_cast<double>(exclamations) * kExclamationIncrement + question_amp;
}

SentimentResult score_valences(const std::vector<double>& sentiments, std::string_view text) {
  if (sentiments.empty()) return {};
  double sum = 0.0;
  for (double s : sentiments) sum += s;
  const double amplifier = punctuation_amplifier(text);
  if (sum > 0) {
    sum += amplifier;
  } else if (sum < 0) {
    sum -= amplifier;
  }

  double pos_sum = 0.0;
  double neg_sum = 0.0;
  std::size_t neutral_count = 0;
  for (double s : sentiments) {
    // +/-1 compensates for neutral words being counted as 1.
    if (s > 0) pos_sum += s + 1;
    if (s < 0) neg_sum += s - 1;
    if (s == 0) ++neutral_count;
  }
  if (pos_sum > std::fabs(neg_sum)) {
    pos_sum += amplifier;
  } else if (pos_sum < std::fabs(neg_sum)) {
    neg_sum -= amplifier;
  }
  const double total = pos_sum + std::fabs(neg_sum) + static_cast<double>(neutral_count);

  SentimentResult result;
  result.compound = normalize(sum);
  result.positive = std::fabs(pos_sum / total);
  result.negative = std::fabs(neg_sum / total);
  result.neutral = std::fabs(static_cast<double>(neutral_count) / total);
  return result;
}

std::optional<double> parse_real(std::string_view field) {
  field = text::trim_ascii(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

double normalize(double raw_sum) {
  const double squared = raw_sum * raw_sum;
  if (!std::isfinite(squared)) return raw_sum > 0 ? 1.0 : -1.0;
  const double norm = raw_sum / std::sqrt(squared + kNormalizationAlpha);
  return std::clamp(norm, -1.0, 1.0);
}

Lexicon load_lexicon(std::istream& source) {
  if (!source) throw LexiconError(LexiconError::Kind::Io, "lexicon stream is not readable");
  Lexicon lex;
  std::set<std::string, std::less<>> seen;
  std::string line;
  while (std::getline(source, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim_ascii(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      ++lex.skipped_lines_;
      continue;
    }
    const std::string_view rest = std::string_view(line).substr(tab + 1);
    const auto value = parse_real(rest.substr(0, rest.find('\t')));
    if (!value) {
      ++lex.skipped_lines_;
      continue;
    }
    std::string token = line.substr(0, tab);
    // Mixed-case tokens can never match a lowercased probe; they still count
    // as loaded entries.
    if (text::to_lower_ascii(token) == token) lex.entries_[token] = *value;
    seen.insert(std::move(token));
  }
  if (source.bad()) throw LexiconError(LexiconError::Kind::Io, "error while reading lexicon");
  if (lex.entries_.empty()) throw LexiconError(LexiconError::Kind::Empty, "lexicon has no valid entries");
  lex.entry_count_ = seen.size();

  for (auto w : kNegations) lex.negations_.emplace(w);
  for (auto w : kIncrementBoosters) lex.boosters_.emplace(w, kBoosterIncrement);
  for (auto w : kDecrementBoosters) lex.boosters_.emplace(w, -kBoosterIncrement);
  for (const auto& [phrase, v] : kSpecialCases) lex.special_cases_.emplace(phrase, v);
  return lex;
}

Lexicon load_lexicon_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LexiconError(LexiconError::Kind::Io, "cannot open lexicon file: " + path.string());
  return load_lexicon(in);
}

StringMap<std::string> load_emoji_descriptions(std::istream& source) {
  if (!source) throw LexiconError(LexiconError::Kind::Io, "emoji stream is not readable");
  StringMap<std::string> table;
  std::string line;
  while (std::getline(source, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) continue;
    std::string key = line.substr(0, tab);
    if (text::code_point_length(key, 0) != key.size()) continue;
    const std::string_view rest = std::string_view(line).substr(tab + 1);
    table.insert_or_assign(std::move(key), std::string(rest.substr(0, rest.find('\t'))));
  }
  return table;
}

StringMap<std::string> load_emoji_descriptions_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LexiconError(LexiconError::Kind::Io, "cannot open emoji file: " + path.string());
  return load_emoji_descriptions(in);
}

SentimentResult analyze(std::string_view input, const Lexicon& lexicon, const RuleToggles& rules) {
  std::string replaced;
  std::string_view text = input;
  if (rules.emoji && !lexicon.emoji_descriptions().empty()) {
    replaced = replace_emojis(input, lexicon.emoji_descriptions());
    text = replaced;
  }
  text = text::strip_whitespace(text);

  std::vector<Token> words;
  for (std::string_view raw : text::split_whitespace(text)) {
    const std::string_view token = strip_punctuation_if_word(raw);
    words.push_back(Token{std::string(token), text::to_lower_ascii(token), is_upper_word(token)});
  }
  const Scorer scorer(lexicon, rules, std::move(words));
  return score_valences(scorer.valences(), text);
}

std::vector<SentimentResult> analyze_batch(std::span<const std::string> texts,
                                           const Lexicon& lexicon, const RuleToggles& rules) {
  std::vector<SentimentResult> out(texts.size());
  const auto n = static_cast<std::ptrdiff_t>(texts.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = analyze(texts[static_cast<std::size_t>(i)], lexicon, rules);
  }
  return out;
}

std::vector<SentimentResult> analyze_batch_serial(std::span<const std::string> texts,
                                                  const Lexicon& lexicon,
                                                  const RuleToggles& rules) {
  std::vector<SentimentResult> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(analyze(t, lexicon, rules));
  return out;
}

}  // namespace proxyllm::sentiment
