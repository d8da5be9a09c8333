#pragma once

// Scriptable in-process stand-in for a local generation server. Implements
// POST /api/generate and GET /api/tags, logs every request, and tracks the
// peak number of concurrently open generation requests.

#include <atomic>
#include <chrono>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

namespace httplib {
class Server;
}

namespace proxyllm::testing {

struct StubReply {
  std::string response;            // value of the "response" field
  int status = 200;
  std::chrono::milliseconds delay{0};
  std::optional<std::string> raw_body;  // sent verbatim instead of JSON when set

  static StubReply text(std::string response) {
    StubReply r;
    r.response = std::move(response);
    return r;
  }
};

struct StubRule {
  std::string prompt_contains;
  StubReply reply;
};

struct StubRequest {
  std::chrono::steady_clock::time_point received;
  std::string method;
  std::string path;
  std::string body;
};

// JSON script: {"default": "text" | {reply}, "rules": [{"contains": "...",
// "reply": "text" | {reply}}]}, where {reply} is
// {"response": "...", "status": 200, "delay_ms": 0, "raw_body": "..."}.
struct StubScript {
  StubReply default_reply = StubReply::text("Thank you for reaching out...");
  std::vector<StubRule> rules;

  static StubScript from_json(const nlohmann::json& doc);
};

class StubBackend {
 public:
  // Binds 127.0.0.1 on `port` (0 picks a free port) and starts serving.
  explicit StubBackend(StubScript script = {}, int port = 0);
  ~StubBackend();
  StubBackend(const StubBackend&) = delete;
  StubBackend& operator=(const StubBackend&) = delete;

  int port() const noexcept { return port_; }
  std::string base_url() const;

  void set_default_reply(StubReply reply);
  void add_rule(std::string prompt_contains, StubReply reply);
  // Queued replies are served first, in order, before rules and the default.
  void enqueue(StubReply reply);

  std::vector<StubRequest> requests() const;
  std::size_t generate_calls() const;
  std::size_t probe_calls() const;
  int peak_in_flight() const noexcept { return peak_in_flight_.load(); }
  void clear_log();

  // Blocks until the server thread exits. Safe to call twice.
  void stop();
  // Blocks while the server is running; used by the standalone binary.
  void wait();

 private:
  StubReply pick_reply(const std::string& prompt);

  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;

  mutable std::mutex mutex_;
  StubScript script_;
  std::deque<StubReply> queue_;
  std::vector<StubRequest> log_;
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_in_flight_{0};
};

}  // namespace proxyllm::testing
