#include "proxyllm/prompting.hpp"

#include <fstream>
#include <map>

#include "proxyllm/kv_file.hpp"
#include "text_util.hpp"

namespace proxyllm::prompting {

namespace {

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

void require_once(std::string_view name, std::string_view tmpl, std::string_view placeholder) {
  if (count_occurrences(tmpl, placeholder) != 1) {
    throw PromptError(PromptError::Kind::InvalidTemplate,
                      std::string(name) + " must contain " + std::string(placeholder) +
                          " exactly once");
  }
}

// Single pass over the template so placeholder-like text inside the
// substituted values is never expanded.
std::string render(std::string_view tmpl, std::string_view text, std::string_view param,
                   bool collapse_period) {
  std::string out;
  out.reserve(tmpl.size() + text.size() + param.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    if (tmpl.substr(pos).starts_with(kTextPlaceholder)) {
      out += text;
      pos += kTextPlaceholder.size();
      if (collapse_period && text.ends_with('.') && pos < tmpl.size() && tmpl[pos] == '.') ++pos;
    } else if (tmpl.substr(pos).starts_with(kParamPlaceholder)) {
      out += param;
      pos += kParamPlaceholder.size();
    } else {
      out.push_back(tmpl[pos++]);
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(PresetKind kind) noexcept {
  switch (kind) {
    case PresetKind::Original: return "original";
    case PresetKind::Neutral: return "neutral";
    case PresetKind::Positive: return "positive";
    case PresetKind::Custom: return "custom";
  }
  return "unknown";
}

std::optional<PresetKind> preset_kind_from_string(std::string_view name) noexcept {
  if (name == "original") return PresetKind::Original;
  if (name == "neutral") return PresetKind::Neutral;
  if (name == "positive") return PresetKind::Positive;
  if (name == "custom") return PresetKind::Custom;
  return std::nullopt;
}

TonePreset TonePreset::custom(std::optional<std::string_view> parameter) {
  TonePreset preset(PresetKind::Custom);
  if (parameter) {
    const std::string_view trimmed = text::trim_ascii(*parameter);
    if (!trimmed.empty()) preset.custom_parameter_ = std::string(trimmed);
  }
  return preset;
}

void PromptTemplates::validate() const {
  require_once("basic_template", basic_template, kTextPlaceholder);
  require_once("basic_template", basic_template, kParamPlaceholder);
  require_once("judge_template", judge_template, kTextPlaceholder);
  if (count_occurrences(judge_template, kParamPlaceholder) != 0) {
    throw PromptError(PromptError::Kind::InvalidTemplate, "judge_template must not contain {PARAM}");
  }
  for (const auto& [name, value] : {std::pair<const char*, const std::string*>{"param_neutral", &param_neutral},
                                    {"param_positive", &param_positive},
                                    {"param_default", &param_default}}) {
    if (text::trim_ascii(*value).empty()) {
      throw PromptError(PromptError::Kind::InvalidTemplate, std::string(name) + " must not be blank");
    }
  }
}

PromptTemplates load_templates(std::istream& source) {
  std::map<std::string, std::string> values;
  try {
    values = parse_key_values(source);
  } catch (const KeyValueError& e) {
    throw PromptError(PromptError::Kind::InvalidTemplate, e.what());
  }
  PromptTemplates t;
  for (auto& [key, value] : values) {
    if (key == "basic_template") {
      t.basic_template = std::move(value);
    } else if (key == "judge_template") {
      t.judge_template = std::move(value);
    } else if (key == "param_neutral") {
      t.param_neutral = std::move(value);
    } else if (key == "param_positive") {
      t.param_positive = std::move(value);
    } else if (key == "param_default") {
      t.param_default = std::move(value);
    } else {
      throw PromptError(PromptError::Kind::InvalidTemplate, "unknown template key '" + key + "'");
    }
  }
  t.validate();
  return t;
}

PromptTemplates load_templates_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PromptError(PromptError::Kind::InvalidTemplate, "cannot open " + path.string());
  return load_templates(in);
}

PromptBuilder::PromptBuilder(PromptTemplates templates, PromptOptions options)
    : templates_(std::move(templates)), options_(options) {
  templates_.validate();
}

std::string PromptBuilder::parameter_for(const TonePreset& preset) const {
  switch (preset.kind()) {
    case PresetKind::Original:
      throw PromptError(PromptError::Kind::NotApplicable,
                        "the original preset is never rewritten; gate the request first");
    case PresetKind::Neutral:
      return templates_.param_neutral;
    case PresetKind::Positive:
      return templates_.param_positive;
    case PresetKind::Custom:
      return preset.custom_parameter().value_or(templates_.param_default);
  }
  throw PromptError(PromptError::Kind::NotApplicable, "unknown preset");
}

std::string PromptBuilder::build_prompt(std::string_view text, const TonePreset& preset) const {
  if (text.empty()) throw PromptError(PromptError::Kind::EmptyInput, "text must not be empty");
  return render(templates_.basic_template, text, parameter_for(preset),
                options_.collapse_terminal_period);
}

std::string PromptBuilder::build_judge_prompt(std::string_view text, bool reply_with_number) const {
  if (text.empty()) throw PromptError(PromptError::Kind::EmptyInput, "text must not be empty");
  std::string prompt = render(templates_.judge_template, text, {}, false);
  if (reply_with_number) prompt += kJudgeReplyInstruction;
  return prompt;
}

namespace {
const PromptBuilder& default_builder() {
  static const PromptBuilder builder;
  return builder;
}
}  // namespace

std::string parameter_for(const TonePreset& preset) { return default_builder().parameter_for(preset); }

std::string build_prompt(std::string_view text, const TonePreset& preset) {
  return default_builder().build_prompt(text, preset);
}

std::string build_judge_prompt(std::string_view text) {
  return default_builder().build_judge_prompt(text);
}

}  // namespace proxyllm::prompting
