#pragma once

// `proxyllm` command-line front end: serve / score / transform / eval.
//
// Every setting resolves as: command line > PROXYLLM_* environment variable
// > config file (--config or PROXYLLM_CONFIG) > built-in default.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "proxyllm/gating.hpp"
#include "proxyllm/llm_client.hpp"

namespace proxyllm::cli {

struct AppConfig {
  std::string listen_host = "127.0.0.1";
  int listen_port = 8787;
  llm::BackendConfig backend;
  gating::GatingPolicy gating;
  std::filesystem::path lexicon_path;
  std::filesystem::path emoji_path;
  std::optional<std::filesystem::path> template_path;
  std::vector<std::string> cors_allowlist{"*"};
  std::size_t max_text_bytes = 32 * 1024;
  std::size_t worker_threads = 16;
  std::chrono::milliseconds shutdown_deadline{10'000};
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key -> raw string value for one configuration source.
using ConfigLayer = std::map<std::string, std::string>;
using EnvLookup = std::function<std::optional<std::string>(const std::string& name)>;

// Recognised keys, e.g. "backend_url", "transform_below".
const std::vector<std::string>& config_keys();
// PROXYLLM_ + upper-cased key.
std::string env_name(const std::string& key);

EnvLookup process_env();
ConfigLayer env_layer(const EnvLookup& env);
// Throws ConfigError for unknown keys or unreadable files.
ConfigLayer file_layer(const std::filesystem::path& path);

// Merges the layers, parses values and checks invariants (port range,
// readable lexicon, valid backend URL and gating policy).
AppConfig resolve_config(const ConfigLayer& cli, const ConfigLayer& env, const ConfigLayer& file);

// Entry point; returns the process exit code (0 ok, 1 usage, 2 runtime).
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err,
        const EnvLookup& env);

}  // namespace proxyllm::cli
