#include "proxyllm/stub_backend.hpp"

#include <stdexcept>

#include <httplib.h>

namespace proxyllm::testing {

namespace {

StubReply reply_from_json(const nlohmann::json& j) {
  if (j.is_string()) return StubReply::text(j.get<std::string>());
  if (!j.is_object()) throw std::invalid_argument("stub reply must be a string or an object");
  StubReply r;
  r.response = j.value("response", std::string{});
  r.status = j.value("status", 200);
  r.delay = std::chrono::milliseconds(j.value("delay_ms", 0));
  if (j.contains("raw_body")) r.raw_body = j.at("raw_body").get<std::string>();
  return r;
}

}  // namespace

StubScript StubScript::from_json(const nlohmann::json& doc) {
  StubScript script;
  if (doc.contains("default")) script.default_reply = reply_from_json(doc.at("default"));
  if (doc.contains("rules")) {
    for (const auto& rule : doc.at("rules")) {
      script.rules.push_back({rule.at("contains").get<std::string>(), reply_from_json(rule.at("reply"))});
    }
  }
  return script;
}

StubBackend::StubBackend(StubScript script, int port)
    : server_(std::make_unique<httplib::Server>()), script_(std::move(script)) {
  server_->new_task_queue = [] { return new httplib::ThreadPool(64); };

  server_->Post("/api/generate", [this](const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard lock(mutex_);
      log_.push_back({std::chrono::steady_clock::now(), "POST", req.path, req.body});
    }
    const int now = ++in_flight_;
    for (int peak = peak_in_flight_.load(); now > peak && !peak_in_flight_.compare_exchange_weak(peak, now);) {
    }

    std::string prompt;
    std::string model = "stub";
    const auto doc = nlohmann::json::parse(req.body, nullptr, false);
    if (doc.is_object()) {
      if (doc.contains("prompt") && doc["prompt"].is_string()) prompt = doc["prompt"];
      if (doc.contains("model") && doc["model"].is_string()) model = doc["model"];
    }
    const StubReply reply = pick_reply(prompt);
    if (reply.delay.count() > 0) std::this_thread::sleep_for(reply.delay);

    res.status = reply.status;
    if (reply.raw_body) {
      res.set_content(*reply.raw_body, "application/json");
    } else {
      const nlohmann::json out = {{"model", model}, {"response", reply.response}, {"done", true}};
      res.set_content(out.dump(), "application/json");
    }
    --in_flight_;
  });

  server_->Get("/api/tags", [this](const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard lock(mutex_);
      log_.push_back({std::chrono::steady_clock::now(), "GET", req.path, {}});
    }
    res.set_content(R"({"models":[{"name":"stub"}]})", "application/json");
  });

  if (port == 0) {
    port_ = server_->bind_to_any_port("127.0.0.1");
  } else {
    port_ = server_->bind_to_port("127.0.0.1", port) ? port : -1;
  }
  if (port_ <= 0) throw std::runtime_error("stub backend could not bind a port");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

StubBackend::~StubBackend() { stop(); }

std::string StubBackend::base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

void StubBackend::set_default_reply(StubReply reply) {
  std::lock_guard lock(mutex_);
  script_.default_reply = std::move(reply);
}

void StubBackend::add_rule(std::string prompt_contains, StubReply reply) {
  std::lock_guard lock(mutex_);
  script_.rules.push_back({std::move(prompt_contains), std::move(reply)});
}

void StubBackend::enqueue(StubReply reply) {
  std::lock_guard lock(mutex_);
  queue_.push_back(std::move(reply));
}

StubReply StubBackend::pick_reply(const std::string& prompt) {
  std::lock_guard lock(mutex_);
  if (!queue_.empty()) {
    StubReply r = std::move(queue_.front());
    queue_.pop_front();
    return r;
  }
  for (const auto& rule : script_.rules) {
    if (prompt.find(rule.prompt_contains) != std::string::npos) return rule.reply;
  }
  return script_.default_reply;
}

std::vector<StubRequest> StubBackend::requests() const {
  std::lock_guard lock(mutex_);
  return log_;
}

std::size_t StubBackend::generate_calls() const {
  std::lock_guard lock(mutex_);
  std::size_t n = 0;
  for (const auto& r : log_) n += r.path == "/api/generate" ? 1 : 0;
  return n;
}

std::size_t StubBackend::probe_calls() const {
  std::lock_guard lock(mutex_);
  std::size_t n = 0;
  for (const auto& r : log_) n += r.path == "/api/tags" ? 1 : 0;
  return n;
}

void StubBackend::clear_log() {
  std::lock_guard lock(mutex_);
  log_.clear();
  peak_in_flight_ = 0;
}

void StubBackend::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void StubBackend::wait() {
  while (server_ && server_->is_running()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
}

}  // namespace proxyllm::testing
