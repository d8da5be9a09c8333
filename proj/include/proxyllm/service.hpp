#pragma once

// score -> gate -> prompt -> generate orchestration, independent of HTTP.

#include <chrono>
#include <cstddef>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

#include "proxyllm/gating.hpp"
#include "proxyllm/llm_client.hpp"
#include "proxyllm/prompting.hpp"
#include "proxyllm/sentiment.hpp"

namespace proxyllm::service {

inline constexpr std::size_t kDefaultMaxTextBytes = 32 * 1024;

struct TransformRequest {
  std::string text;
  prompting::TonePreset preset = prompting::TonePreset::positive();
  bool force = false;
  std::optional<std::string> request_id;
};

struct TransformResponse {
  std::string original_text;
  std::string transformed_text;
  double compound_score = 0.0;
  bool bypassed = false;
  std::optional<gating::Reason> bypass_reason;
  std::optional<std::string> model_used;
  bool degraded = false;
  std::optional<std::string> degraded_reason;  // backend error code when degraded
  std::chrono::milliseconds latency{0};
  std::optional<std::string> request_id;
};

struct HealthReport {
  std::string status = "ok";
  bool backend_reachable = false;
  std::string model_name;
};

// Client-side problems with a request. `http_status` is 400 or 413.
class RequestError : public std::runtime_error {
 public:
  RequestError(int http_status, std::string code, const std::string& message)
      : std::runtime_error(message), http_status_(http_status), code_(std::move(code)) {}

  int http_status() const noexcept { return http_status_; }
  const std::string& code() const noexcept { return code_; }

 private:
  int http_status_;
  std::string code_;
};

struct PipelineOptions {
  gating::GatingPolicy policy;
  std::size_t max_text_bytes = kDefaultMaxTextBytes;
  std::chrono::milliseconds health_ttl{30'000};
  sentiment::RuleToggles rules;
};

// Shared by all request handlers. The lexicon, prompt builder and backend
// must outlive the pipeline; the backend must be thread-safe.
class Pipeline {
 public:
  Pipeline(const sentiment::Lexicon& lexicon, prompting::PromptBuilder prompts,
           llm::GenerationBackend& backend, PipelineOptions options = {});

  // Backend failures never escape: the response is marked degraded and
  // carries the original text. Throws RequestError for invalid input.
  TransformResponse transform(const TransformRequest& request) const;

  // Throws RequestError for empty or oversized text.
  sentiment::SentimentResult score(std::string_view text) const;

  // Probes the backend at most once per health_ttl.
  HealthReport health();

  const PipelineOptions& options() const noexcept { return options_; }

 private:
  void check_size(std::string_view text) const;

  const sentiment::Lexicon& lexicon_;
  prompting::PromptBuilder prompts_;
  llm::GenerationBackend& backend_;
  PipelineOptions options_;

  std::mutex health_mutex_;
  std::optional<std::chrono::steady_clock::time_point> last_probe_;
  bool last_reachable_ = false;
};

}  // namespace proxyllm::service
