#include "proxyllm/gating.hpp"

#include <cmath>
#include <string>

namespace proxyllm::gating {

std::string_view to_string(Action action) noexcept {
  return action == Action::Transform ? "transform" : "bypass";
}

std::string_view to_string(Reason reason) noexcept {
  switch (reason) {
    case Reason::BelowThreshold: return "below_threshold";
    case Reason::AboveThreshold: return "above_threshold";
    case Reason::InNeutralBand: return "in_neutral_band";
    case Reason::PresetOriginal: return "preset_original";
    case Reason::Forced: return "forced";
  }
  return "unknown";
}

std::optional<Reason> reason_from_string(std::string_view name) noexcept {
  for (Reason r : {Reason::BelowThreshold, Reason::AboveThreshold, Reason::InNeutralBand,
                   Reason::PresetOriginal, Reason::Forced}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

void validate(const GatingPolicy& policy) {
  const auto in_range = [](double v) { return std::isfinite(v) && v >= -1.0 && v <= 1.0; };
  if (!in_range(policy.transform_below) || !in_range(policy.transform_above)) {
    throw PolicyError("gating thresholds must lie in [-1, 1]");
  }
  if (policy.transform_below > policy.transform_above) {
    throw PolicyError("transform_below (" + std::to_string(policy.transform_below) +
                      ") exceeds transform_above (" + std::to_string(policy.transform_above) + ")");
  }
}

GateDecision gate(const sentiment::SentimentResult& score, const prompting::TonePreset& preset,
                  const GatingPolicy& policy) {
  validate(policy);
  if (preset.kind() == prompting::PresetKind::Original) {
    return {Action::Bypass, Reason::PresetOriginal};
  }
  if (policy.force) return {Action::Transform, Reason::Forced};
  if (score.compound < policy.transform_below) return {Action::Transform, Reason::BelowThreshold};
  if (score.compound > policy.transform_above) return {Action::Transform, Reason::AboveThreshold};
  return {Action::Bypass, Reason::InNeutralBand};
}

}  // namespace proxyllm::gating
