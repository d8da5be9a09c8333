#include "proxyllm/wire.hpp"

#include "text_util.hpp"

namespace proxyllm::wire {

using nlohmann::json;
using service::RequestError;

namespace {

[[noreturn]] void invalid(const std::string& message) {
  throw RequestError(400, "invalid_request", message);
}

json parse_object(std::string_view body) {
  if (!text::is_valid_utf8(body)) throw RequestError(400, "invalid_json", "body is not valid UTF-8");
  auto doc = json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw RequestError(400, "invalid_json", "body is not valid JSON");
  if (!doc.is_object()) invalid("body must be a JSON object");
  return doc;
}

std::string required_text(const json& doc) {
  if (!doc.contains("text")) invalid("missing field 'text'");
  if (!doc["text"].is_string()) invalid("'text' must be a string");
  return doc["text"].get<std::string>();
}

}  // namespace

prompting::TonePreset preset_from_json(const json& j) {
  std::string kind_name;
  std::optional<std::string> parameter;
  if (j.is_string()) {
    kind_name = j.get<std::string>();
  } else if (j.is_object()) {
    if (!j.contains("kind") || !j["kind"].is_string()) invalid("preset.kind must be a string");
    kind_name = j["kind"].get<std::string>();
    if (j.contains("custom_parameter") && !j["custom_parameter"].is_null()) {
      if (!j["custom_parameter"].is_string()) invalid("preset.custom_parameter must be a string");
      parameter = j["custom_parameter"].get<std::string>();
    }
  } else {
    invalid("preset must be a string or an object");
  }
  const auto kind = prompting::preset_kind_from_string(kind_name);
  if (!kind) invalid("unknown preset kind '" + kind_name + "'");
  switch (*kind) {
    case prompting::PresetKind::Original: return prompting::TonePreset::original();
    case prompting::PresetKind::Neutral: return prompting::TonePreset::neutral();
    case prompting::PresetKind::Positive: return prompting::TonePreset::positive();
    case prompting::PresetKind::Custom:
      return parameter ? prompting::TonePreset::custom(*parameter) : prompting::TonePreset::custom();
  }
  invalid("unknown preset kind");
}

json to_json(const prompting::TonePreset& preset) {
  json j = {{"kind", prompting::to_string(preset.kind())}};
  if (preset.custom_parameter()) j["custom_parameter"] = *preset.custom_parameter();
  return j;
}

service::TransformRequest parse_transform_request(std::string_view body) {
  const json doc = parse_object(body);
  service::TransformRequest req;
  req.text = required_text(doc);
  if (!text::is_valid_utf8(req.text)) invalid("'text' is not valid UTF-8");
  if (doc.contains("preset")) req.preset = preset_from_json(doc["preset"]);
  if (doc.contains("force")) {
    if (!doc["force"].is_boolean()) invalid("'force' must be a boolean");
    req.force = doc["force"].get<bool>();
  }
  if (doc.contains("request_id") && !doc["request_id"].is_null()) {
    if (!doc["request_id"].is_string()) invalid("'request_id' must be a string");
    req.request_id = doc["request_id"].get<std::string>();
  }
  return req;
}

std::string parse_score_request(std::string_view body) {
  return required_text(parse_object(body));
}

json to_json(const service::TransformResponse& r) {
  json j = {
      {"original_text", r.original_text},
      {"transformed_text", r.transformed_text},
      {"compound_score", r.compound_score},
      {"bypassed", r.bypassed},
      {"degraded", r.degraded},
      {"latency_ms", r.latency.count()},
  };
  j["bypass_reason"] = r.bypass_reason ? json(gating::to_string(*r.bypass_reason)) : json(nullptr);
  j["model_used"] = r.model_used ? json(*r.model_used) : json(nullptr);
  if (r.degraded_reason) j["degraded_reason"] = *r.degraded_reason;
  if (r.request_id) j["request_id"] = *r.request_id;
  return j;
}

json to_json(const sentiment::SentimentResult& s) {
  return {{"negative", s.negative}, {"neutral", s.neutral}, {"positive", s.positive},
          {"compound", s.compound}};
}

json to_json(const service::HealthReport& h) {
  return {{"status", h.status}, {"backend_reachable", h.backend_reachable}, {"model_name", h.model_name}};
}

json error_envelope(std::string_view code, std::string_view message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

}  // namespace proxyllm::wire
