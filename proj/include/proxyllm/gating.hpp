#pragma once

// Decides whether a scored message is rewritten or passed through untouched.

#include <optional>
#include <stdexcept>
#include <string_view>

#include "proxyllm/prompting.hpp"
#include "proxyllm/sentiment.hpp"

namespace proxyllm::gating {

enum class Action { Transform, Bypass };

enum class Reason { BelowThreshold, AboveThreshold, InNeutralBand, PresetOriginal, Forced };

std::string_view to_string(Action action) noexcept;
std::string_view to_string(Reason reason) noexcept;
std::optional<Reason> reason_from_string(std::string_view name) noexcept;

// Text is rewritten when its compound score is below `transform_below` or
// above `transform_above`. The defaults rewrite only negative text.
struct GatingPolicy {
  double transform_below = -0.05;
  double transform_above = 1.0;
  bool force = false;
};

class PolicyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void validate(const GatingPolicy& policy);

struct GateDecision {
  Action action = Action::Bypass;
  Reason reason = Reason::InNeutralBand;

  bool operator==(const GateDecision&) const = default;
};

GateDecision gate(const sentiment::SentimentResult& score, const prompting::TonePreset& preset,
                  const GatingPolicy& policy);

}  // namespace proxyllm::gating
