#include "proxyllm/llm_client.hpp"

#include <charconv>
#include <thread>

#include <httplib.h>

#include "text_util.hpp"

namespace proxyllm::llm {

namespace {

using Clock = std::chrono::steady_clock;
constexpr std::size_t kBodyExcerpt = 200;

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<>& sem) : sem_(sem) { sem_.acquire(); }
  ~SlotGuard() { sem_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<>& sem_;
};

httplib::Client make_client(const Endpoint& ep, std::chrono::milliseconds timeout) {
  httplib::Client client(ep.host, ep.port);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  client.set_keep_alive(false);
  return client;
}

bool is_retryable(httplib::Error err) {
  return err == httplib::Error::Connection || err == httplib::Error::ConnectionTimeout ||
         err == httplib::Error::Read || err == httplib::Error::Write;
}

BackendError::Kind transport_kind(httplib::Error err) {
  return err == httplib::Error::Connection ? BackendError::Kind::Connection
                                           : BackendError::Kind::Timeout;
}

}  // namespace

std::string_view to_string(BackendError::Kind kind) noexcept {
  switch (kind) {
    case BackendError::Kind::Timeout: return "backend_timeout";
    case BackendError::Kind::Connection: return "backend_unreachable";
    case BackendError::Kind::Status: return "backend_status";
    case BackendError::Kind::Protocol: return "backend_protocol";
  }
  return "backend_error";
}

Endpoint Endpoint::parse(std::string_view url) {
  constexpr std::string_view kScheme = "http://";
  if (!url.starts_with(kScheme)) {
    throw std::invalid_argument("backend URL must start with http://: " + std::string(url));
  }
  std::string_view rest = url.substr(kScheme.size());
  const auto slash = rest.find('/');
  std::string_view authority = rest.substr(0, slash);
  Endpoint ep;
  if (slash != std::string_view::npos) {
    std::string_view path = rest.substr(slash);
    while (path.ends_with('/')) path.remove_suffix(1);
    ep.base_path = std::string(path);
  }
  if (authority.empty()) throw std::invalid_argument("backend URL has no host: " + std::string(url));
  std::string_view host = authority;
  if (authority.front() == '[') {
    const auto close = authority.find(']');
    if (close == std::string_view::npos) throw std::invalid_argument("bad IPv6 literal in URL");
    host = authority.substr(1, close - 1);
    authority.remove_prefix(close + 1);
  } else {
    host = authority.substr(0, authority.find(':'));
    authority.remove_prefix(host.size());
  }
  if (host.empty() || host.find_first_of(" \t@") != std::string_view::npos) {
    throw std::invalid_argument("invalid host in backend URL: " + std::string(url));
  }
  ep.host = std::string(host);
  if (!authority.empty()) {
    if (authority.front() != ':') throw std::invalid_argument("invalid backend URL: " + std::string(url));
    authority.remove_prefix(1);
    int port = 0;
    const auto [ptr, ec] = std::from_chars(authority.data(), authority.data() + authority.size(), port);
    if (ec != std::errc{} || ptr != authority.data() + authority.size() || port < 1 || port > 65535) {
      throw std::invalid_argument("invalid port in backend URL: " + std::string(url));
    }
    ep.port = port;
  }
  return ep;
}

void BackendConfig::validate() const {
  (void)Endpoint::parse(base_url);
  if (model_name.empty()) throw std::invalid_argument("model name must not be empty");
  if (request_timeout.count() <= 0) throw std::invalid_argument("request timeout must be positive");
  if (max_retries < 0) throw std::invalid_argument("max_retries must be >= 0");
  if (max_in_flight < 1) throw std::invalid_argument("max_in_flight must be >= 1");
  if (retry_backoff.count() < 0) throw std::invalid_argument("retry backoff must be >= 0");
  if (!options.is_object()) throw std::invalid_argument("generation options must be a JSON object");
}

OllamaClient::OllamaClient(BackendConfig config)
    : config_(std::move(config)), endpoint_(Endpoint::parse(config_.base_url)) {
  config_.validate();
  slots_ = std::make_unique<std::counting_semaphore<>>(config_.max_in_flight);
}

GenerationResult OllamaClient::generate(const std::string& prompt) {
  if (prompt.empty()) throw std::invalid_argument("prompt must not be empty");

  nlohmann::json request = {{"model", config_.model_name}, {"prompt", prompt}, {"stream", false}};
  if (!config_.options.empty()) request["options"] = config_.options;
  const std::string body = request.dump();
  const std::string path = endpoint_.path("/api/generate");

  const auto started = Clock::now();
  auto backoff = config_.retry_backoff;
  const int attempts_allowed = config_.max_retries + 1;
  for (int attempt = 1;; ++attempt) {
    httplib::Result res;
    {
      SlotGuard slot(*slots_);
      auto client = make_client(endpoint_, config_.request_timeout);
      res = client.Post(path, body, "application/json");
    }
    if (!res) {
      const httplib::Error err = res.error();
      if (is_retryable(err) && attempt < attempts_allowed) {
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
        continue;
      }
      throw BackendError(transport_kind(err),
                         "generation request failed after " + std::to_string(attempt) +
                             " attempt(s): " + httplib::to_string(err),
                         0, attempt);
    }

    if (res->status < 200 || res->status >= 300) {
      throw BackendError(BackendError::Kind::Status,
                         "backend returned HTTP " + std::to_string(res->status) + ": " +
                             res->body.substr(0, kBodyExcerpt),
                         res->status, attempt);
    }

    const auto doc = nlohmann::json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("response") ||
        !doc["response"].is_string()) {
      throw BackendError(BackendError::Kind::Protocol,
                         "backend reply has no string 'response' field: " +
                             res->body.substr(0, kBodyExcerpt),
                         res->status, attempt);
    }
    GenerationResult result;
    result.text = std::string(text::trim_ascii(doc["response"].get_ref<const std::string&>()));
    if (result.text.empty()) {
      throw BackendError(BackendError::Kind::Protocol, "backend returned an empty completion",
                         res->status, attempt);
    }
    result.model_used = doc.contains("model") && doc["model"].is_string()
                            ? doc["model"].get<std::string>()
                            : config_.model_name;
    result.latency = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);
    return result;
  }
}

bool OllamaClient::probe() {
  try {
    auto client = make_client(endpoint_, std::min(config_.request_timeout, std::chrono::milliseconds(2000)));
    auto res = client.Get(endpoint_.path("/api/tags"));
    return res && res->status >= 200 && res->status < 300;
  } catch (...) {
    return false;
  }
}

GenerationResult generate(const std::string& prompt, const BackendConfig& config) {
  OllamaClient client(config);
  return client.generate(prompt);
}

}  // namespace proxyllm::llm
