#pragma once

// Client for a local text-generation endpoint speaking the
// `POST /api/generate {model, prompt, stream:false}` JSON protocol.

#include <chrono>
#include <memory>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace proxyllm::llm {

// http://host[:port][/prefix]. Only plain HTTP is supported; the backend is
// expected to run on the local host or a trusted network.
struct Endpoint {
  std::string host;
  int port = 80;
  std::string base_path;  // without trailing slash, may be empty

  static Endpoint parse(std::string_view url);
  std::string path(std::string_view suffix) const { return base_path + std::string(suffix); }
};

struct BackendConfig {
  std::string base_url = "http://127.0.0.1:11434";
  std::string model_name = "llama3.1:8b";
  std::chrono::milliseconds request_timeout{60'000};
  int max_retries = 1;
  int max_in_flight = 4;
  std::chrono::milliseconds retry_backoff{500};  // doubled after every retry
  // Forwarded verbatim as the request's "options" object when non-empty.
  nlohmann::json options = nlohmann::json::object();

  // Throws std::invalid_argument.
  void validate() const;
};

struct GenerationResult {
  std::string text;
  std::string model_used;
  std::chrono::milliseconds latency{0};
};

class BackendError : public std::runtime_error {
 public:
  enum class Kind { Timeout, Connection, Status, Protocol };

  BackendError(Kind kind, const std::string& what, int status = 0, int attempts = 1)
      : std::runtime_error(what), kind_(kind), status_(status), attempts_(attempts) {}

  Kind kind() const noexcept { return kind_; }
  int status() const noexcept { return status_; }
  int attempts() const noexcept { return attempts_; }

 private:
  Kind kind_;
  int status_;
  int attempts_;
};

std::string_view to_string(BackendError::Kind kind) noexcept;

// Seam between the pipeline and a concrete generation protocol.
class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual GenerationResult generate(const std::string& prompt) = 0;
  // Cheap liveness check; never throws.
  virtual bool probe() = 0;
  virtual const std::string& model_name() const = 0;
};

// Thread-safe. At most `max_in_flight` requests are outstanding at once;
// callers beyond that block until a slot frees up.
class OllamaClient final : public GenerationBackend {
 public:
  explicit OllamaClient(BackendConfig config);

  GenerationResult generate(const std::string& prompt) override;
  bool probe() override;
  const std::string& model_name() const override { return config_.model_name; }
  const BackendConfig& config() const noexcept { return config_; }

 private:
  BackendConfig config_;
  Endpoint endpoint_;
  std::unique_ptr<std::counting_semaphore<>> slots_;
};

// One-shot helper; builds a client for a single call.
GenerationResult generate(const std::string& prompt, const BackendConfig& config);

}  // namespace proxyllm::llm
