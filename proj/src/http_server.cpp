#include "proxyllm/http_server.hpp"

#include <algorithm>
#include <stdexcept>

#include <httplib.h>

#include "proxyllm/wire.hpp"

namespace proxyllm::service {

namespace {

constexpr const char* kJson = "application/json";

void send_error(httplib::Response& res, int status, std::string_view code, std::string_view message) {
  res.status = status;
  res.set_content(wire::error_envelope(code, message).dump(), kJson);
}

}  // namespace

GatewayServer::GatewayServer(Pipeline& pipeline, ServerConfig config)
    : pipeline_(pipeline), config_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
  const std::size_t threads = std::max<std::size_t>(1, config_.worker_threads);
  server_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  // Leave headroom over the text cap for JSON framing; larger bodies get 413.
  server_->set_payload_max_length(pipeline_.options().max_text_bytes * 6 + 4096);
  install_routes();
}

GatewayServer::~GatewayServer() {
  if (server_) stop();
}

std::string GatewayServer::allowed_origin(const std::string& origin) const {
  for (const auto& allowed : config_.cors_allowlist) {
    if (allowed == "*") return "*";
    if (!origin.empty() && allowed == origin) return origin;
  }
  return {};
}

void GatewayServer::install_routes() {
  server_->set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    const std::string origin = allowed_origin(req.get_header_value("Origin"));
    if (!origin.empty()) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      if (origin != "*") res.set_header("Vary", "Origin");
    }
    if (req.method == "OPTIONS") {
      res.status = 204;
      return httplib::Server::HandlerResponse::Handled;
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  server_->Post("/v1/transform", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      const auto request = wire::parse_transform_request(req.body);
      const auto response = pipeline_.transform(request);
      res.set_content(wire::to_json(response).dump(), kJson);
    } catch (const RequestError& e) {
      send_error(res, e.http_status(), e.code(), e.what());
    }
  });

  server_->Post("/v1/score", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      const std::string text = wire::parse_score_request(req.body);
      res.set_content(wire::to_json(pipeline_.score(text)).dump(), kJson);
    } catch (const RequestError& e) {
      send_error(res, e.http_status(), e.code(), e.what());
    }
  });

  server_->Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(wire::to_json(pipeline_.health()).dump(), kJson);
  });

  server_->set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string message = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      message = e.what();
    } catch (...) {
    }
    send_error(res, 500, "internal_error", message);
  });

  // Fills in envelopes for errors raised by the HTTP layer itself (404, 413
  // on oversized bodies, ...). Handler-produced errors already have a body.
  server_->set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    switch (res.status) {
      case 404: send_error(res, 404, "not_found", "no such endpoint"); break;
      case 413: send_error(res, 413, "payload_too_large", "request body too large"); break;
      case 400: send_error(res, 400, "invalid_request", "malformed HTTP request"); break;
      default: send_error(res, res.status, "http_error", "request failed"); break;
    }
  });
}

int GatewayServer::bind() {
  if (port_ > 0) return port_;
  if (config_.port == 0) {
    port_ = server_->bind_to_any_port(config_.host);
  } else {
    port_ = server_->bind_to_port(config_.host, config_.port) ? config_.port : -1;
  }
  if (port_ <= 0) {
    throw std::runtime_error("cannot listen on " + config_.host + ":" + std::to_string(config_.port));
  }
  return port_;
}

void GatewayServer::start() {
  bind();
  std::packaged_task<void()> task([this] { server_->listen_after_bind(); });
  finished_ = task.get_future();
  thread_ = std::thread(std::move(task));
  server_->wait_until_ready();
}

bool GatewayServer::stop() {
  if (!server_ || !thread_.joinable()) return true;
  server_->stop();
  if (finished_.wait_for(config_.shutdown_deadline) != std::future_status::ready) {
    // Workers still reference the server; leak it rather than free it under them.
    thread_.detach();
    (void)server_.release();
    return false;
  }
  thread_.join();
  return true;
}

std::string GatewayServer::base_url() const {
  return "http://" + config_.host + ":" + std::to_string(port_);
}

}  // namespace proxyllm::service
