#include "proxyllm/service.hpp"

namespace proxyllm::service {

namespace {
using Clock = std::chrono::steady_clock;

std::chrono::milliseconds since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
}
}  // namespace

Pipeline::Pipeline(const sentiment::Lexicon& lexicon, prompting::PromptBuilder prompts,
                   llm::GenerationBackend& backend, PipelineOptions options)
    : lexicon_(lexicon), prompts_(std::move(prompts)), backend_(backend), options_(options) {
  gating::validate(options_.policy);
}

void Pipeline::check_size(std::string_view text) const {
  if (text.size() > options_.max_text_bytes) {
    throw RequestError(413, "payload_too_large",
                       "text is " + std::to_string(text.size()) + " bytes; limit is " +
                           std::to_string(options_.max_text_bytes));
  }
}

sentiment::SentimentResult Pipeline::score(std::string_view text) const {
  if (text.empty()) throw RequestError(400, "empty_text", "text must not be empty");
  check_size(text);
  return sentiment::analyze(text, lexicon_, options_.rules);
}

TransformResponse Pipeline::transform(const TransformRequest& request) const {
  const auto started = Clock::now();
  if (request.text.empty()) throw RequestError(400, "invalid_request", "text must not be empty");
  check_size(request.text);

  TransformResponse response;
  response.original_text = request.text;
  response.transformed_text = request.text;
  response.request_id = request.request_id;

  const auto scored = sentiment::analyze(request.text, lexicon_, options_.rules);
  response.compound_score = scored.compound;

  gating::GatingPolicy policy = options_.policy;
  policy.force = policy.force || request.force;
  const auto decision = gating::gate(scored, request.preset, policy);
  if (decision.action == gating::Action::Bypass) {
    response.bypassed = true;
    response.bypass_reason = decision.reason;
    response.latency = since(started);
    return response;
  }

  const std::string prompt = prompts_.build_prompt(request.text, request.preset);
  try {
    auto generated = backend_.generate(prompt);
    response.transformed_text = std::move(generated.text);
    response.model_used = std::move(generated.model_used);
  } catch (const llm::BackendError& e) {
    response.degraded = true;
    response.degraded_reason = std::string(llm::to_string(e.kind()));
  } catch (const std::exception&) {
    response.degraded = true;
    response.degraded_reason = "backend_error";
  }
  response.latency = since(started);
  return response;
}

HealthReport Pipeline::health() {
  std::lock_guard lock(health_mutex_);
  const auto now = Clock::now();
  if (!last_probe_ || now - *last_probe_ >= options_.health_ttl) {
    last_reachable_ = backend_.probe();
    last_probe_ = now;
  }
  return HealthReport{"ok", last_reachable_, backend_.model_name()};
}

}  // namespace proxyllm::service
