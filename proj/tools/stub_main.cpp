#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "proxyllm/stub_backend.hpp"

// Scripted stand-in for a local generation server, for manual testing of the
// gateway and evaluator without a model.
int main(int argc, char** argv) {
  CLI::App app{"Scripted generation-server stub", "proxyllm-stub"};
  int port = 11434;
  std::optional<std::string> reply;
  std::optional<std::string> script_path;
  app.add_option("--port", port, "Port on 127.0.0.1 (0 picks a free port)")->check(CLI::Range(0, 65535));
  app.add_option("--reply", reply, "Default completion text");
  app.add_option("--script", script_path, "JSON reply script")->check(CLI::ExistingFile);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    proxyllm::testing::StubScript script;
    if (script_path) {
      std::ifstream in(*script_path);
      script = proxyllm::testing::StubScript::from_json(nlohmann::json::parse(in));
    }
    if (reply) script.default_reply.response = *reply;
    proxyllm::testing::StubBackend stub(std::move(script), port);
    std::cout << "proxyllm-stub listening on " << stub.base_url() << std::endl;
    int received = 0;
    sigwait(&signals, &received);
    stub.stop();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
