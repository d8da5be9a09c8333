#pragma once

// HTTP front end for the pipeline:
//   POST /v1/transform, POST /v1/score, GET /v1/health

#include <chrono>
#include <future>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "proxyllm/service.hpp"

namespace httplib {
class Server;
}

namespace proxyllm::service {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8787;  // 0 picks a free port
  // Allowed CORS origins; "*" allows any.
  std::vector<std::string> cors_allowlist{"*"};
  std::size_t worker_threads = 16;
  std::chrono::milliseconds shutdown_deadline{10'000};
};

class GatewayServer {
 public:
  GatewayServer(Pipeline& pipeline, ServerConfig config);
  ~GatewayServer();
  GatewayServer(const GatewayServer&) = delete;
  GatewayServer& operator=(const GatewayServer&) = delete;

  // Binds the listening socket; returns the bound port. Throws on failure.
  int bind();
  // Serves on a background thread (binds first if needed).
  void start();
  // Stops accepting connections and waits for in-flight requests, up to
  // the configured shutdown deadline. Returns false if the deadline passed.
  bool stop();

  int port() const noexcept { return port_; }
  std::string base_url() const;

 private:
  void install_routes();
  std::string allowed_origin(const std::string& origin) const;

  Pipeline& pipeline_;
  ServerConfig config_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::future<void> finished_;
  int port_ = -1;
};

}  // namespace proxyllm::service
