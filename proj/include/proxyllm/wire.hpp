#pragma once

// JSON encodings of the gateway's request and response documents.

#include <string>
#include <string_view>

#include <json.hpp>

#include "proxyllm/prompting.hpp"
#include "proxyllm/sentiment.hpp"
#include "proxyllm/service.hpp"

namespace proxyllm::wire {

// Accepts {"kind": "...", "custom_parameter": "..."} or the bare kind string.
// Throws service::RequestError(400, "invalid_request").
prompting::TonePreset preset_from_json(const nlohmann::json& j);
nlohmann::json to_json(const prompting::TonePreset& preset);

// Throws service::RequestError for malformed documents.
service::TransformRequest parse_transform_request(std::string_view body);
std::string parse_score_request(std::string_view body);

nlohmann::json to_json(const service::TransformResponse& response);
nlohmann::json to_json(const sentiment::SentimentResult& result);
nlohmann::json to_json(const service::HealthReport& report);

nlohmann::json error_envelope(std::string_view code, std::string_view message);

}  // namespace proxyllm::wire
