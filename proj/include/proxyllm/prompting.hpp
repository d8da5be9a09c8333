#pragma once

// Tone presets and the style-transfer / judge prompt templates.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace proxyllm::prompting {

enum class PresetKind { Original, Neutral, Positive, Custom };

std::string_view to_string(PresetKind kind) noexcept;
std::optional<PresetKind> preset_kind_from_string(std::string_view name) noexcept;

// Agent-selected target tone. A Custom preset without a usable parameter
// falls back to the default parameter when the prompt is built.
class TonePreset {
 public:
  TonePreset() = default;

  static TonePreset original() { return TonePreset(PresetKind::Original); }
  static TonePreset neutral() { return TonePreset(PresetKind::Neutral); }
  static TonePreset positive() { return TonePreset(PresetKind::Positive); }
  // Surrounding whitespace is stripped; a blank parameter is dropped.
  static TonePreset custom(std::optional<std::string_view> parameter = std::nullopt);

  PresetKind kind() const noexcept { return kind_; }
  const std::optional<std::string>& custom_parameter() const noexcept { return custom_parameter_; }

  bool operator==(const TonePreset&) const = default;

 private:
  explicit TonePreset(PresetKind kind) : kind_(kind) {}

  PresetKind kind_ = PresetKind::Positive;
  std::optional<std::string> custom_parameter_;
};

class PromptError : public std::runtime_error {
 public:
  enum class Kind { NotApplicable, EmptyInput, InvalidTemplate };

  PromptError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::string_view kTextPlaceholder = "{TEXT}";
inline constexpr std::string_view kParamPlaceholder = "{PARAM}";
inline constexpr std::string_view kJudgeReplyInstruction = " Reply with only the number.";

struct PromptTemplates {
  std::string basic_template =
      "This is original text. Change this text style. {TEXT}. "
      "Change this text content to be more {PARAM}";
  std::string judge_template =
      "Please mark the sentimental score I present from -1.0 (very negative) to 1.0 "
      "(very positive). {TEXT}";
  std::string param_neutral =
      "rewriting in a neutral tone to remove any emotional, biased, or subjective elements "
      "while preserving the original meaning.";
  std::string param_positive =
      "rewriting in a positive tone, enhancing the optimism and uplifting language while "
      "preserving the original meaning and intent.";
  std::string param_default = "polite";

  // Throws PromptError(InvalidTemplate) unless basic_template holds {TEXT} and
  // {PARAM} exactly once, judge_template holds {TEXT} exactly once, and every
  // parameter text is non-blank.
  void validate() const;
};

// Key/value override document (`key = value` lines, `#` comments). Keys:
// basic_template, judge_template, param_neutral, param_positive, param_default.
// Absent keys keep their defaults.
PromptTemplates load_templates(std::istream& source);
PromptTemplates load_templates_file(const std::filesystem::path& path);

struct PromptOptions {
  // Drop the template period after {TEXT} when the text already ends in one.
  bool collapse_terminal_period = false;
};

class PromptBuilder {
 public:
  PromptBuilder() : PromptBuilder(PromptTemplates{}) {}
  explicit PromptBuilder(PromptTemplates templates, PromptOptions options = {});

  std::string parameter_for(const TonePreset& preset) const;
  std::string build_prompt(std::string_view text, const TonePreset& preset) const;
  std::string build_judge_prompt(std::string_view text, bool reply_with_number = false) const;

  const PromptTemplates& templates() const noexcept { return templates_; }

 private:
  PromptTemplates templates_;
  PromptOptions options_;
};

// Shortcuts using the built-in templates.
std::string parameter_for(const TonePreset& preset);
std::string build_prompt(std::string_view text, const TonePreset& preset);
std::string build_judge_prompt(std::string_view text);

}  // namespace proxyllm::prompting
