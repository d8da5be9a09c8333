#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>

#include "proxyllm/cli.hpp"
#include "proxyllm/kv_file.hpp"
#include "text_util.hpp"

#ifndef PROXYLLM_DATA_DIR
#define PROXYLLM_DATA_DIR "data"
#endif

namespace proxyllm::cli {

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& raw) {
  T value{};
  const char* end = raw.data() + raw.size();
  const auto [ptr, ec] = std::from_chars(raw.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("invalid value for " + key + ": '" + raw + "'");
  }
  return value;
}

std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> out;
  std::string_view rest = raw;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = text::trim_ascii(rest.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

std::pair<std::string, int> parse_listen(const std::string& raw) {
  const auto colon = raw.rfind(':');
  if (colon == std::string::npos || colon == 0) throw ConfigError("listen must be host:port, got '" + raw + "'");
  std::string host = raw.substr(0, colon);
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  const int port = parse_number<int>("listen port", raw.substr(colon + 1));
  if (port < 1 || port > 65535) throw ConfigError("listen port must be in [1, 65535], got " + std::to_string(port));
  return {host, port};
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "listen",          "backend_url",       "model",          "request_timeout_ms",
      "max_retries",     "max_in_flight",     "transform_below", "transform_above",
      "lexicon",         "emoji_lexicon",     "templates",      "cors_allowlist",
      "max_text_bytes",  "worker_threads",    "shutdown_deadline_ms"};
  return keys;
}

std::string env_name(const std::string& key) {
  std::string name = "PROXYLLM_" + key;
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return name;
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

ConfigLayer env_layer(const EnvLookup& env) {
  ConfigLayer layer;
  for (const auto& key : config_keys()) {
    if (auto v = env(env_name(key))) layer[key] = *v;
  }
  return layer;
}

ConfigLayer file_layer(const std::filesystem::path& path) {
  ConfigLayer layer;
  try {
    layer = read_key_value_file(path);
  } catch (const KeyValueError& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  const auto& keys = config_keys();
  for (const auto& [key, value] : layer) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("config file " + path.string() + ": unknown key '" + key + "'");
    }
  }
  return layer;
}

AppConfig resolve_config(const ConfigLayer& cli, const ConfigLayer& env, const ConfigLayer& file) {
  const auto lookup = [&](const std::string& key) -> std::optional<std::string> {
    for (const ConfigLayer* layer : {&cli, &env, &file}) {
      if (auto it = layer->find(key); it != layer->end()) return it->second;
    }
    return std::nullopt;
  };

  AppConfig cfg;
  cfg.lexicon_path = std::filesystem::path(PROXYLLM_DATA_DIR) / "vader_lexicon.txt";
  cfg.emoji_path = std::filesystem::path(PROXYLLM_DATA_DIR) / "emoji_utf8_lexicon.txt";

  if (auto v = lookup("listen")) std::tie(cfg.listen_host, cfg.listen_port) = parse_listen(*v);
  if (auto v = lookup("backend_url")) cfg.backend.base_url = *v;
  if (auto v = lookup("model")) cfg.backend.model_name = *v;
  if (auto v = lookup("request_timeout_ms")) {
    cfg.backend.request_timeout = std::chrono::milliseconds(parse_number<long>("request_timeout_ms", *v));
  }
  if (auto v = lookup("max_retries")) cfg.backend.max_retries = parse_number<int>("max_retries", *v);
  if (auto v = lookup("max_in_flight")) cfg.backend.max_in_flight = parse_number<int>("max_in_flight", *v);
  if (auto v = lookup("transform_below")) cfg.gating.transform_below = parse_number<double>("transform_below", *v);
  if (auto v = lookup("transform_above")) cfg.gating.transform_above = parse_number<double>("transform_above", *v);
  if (auto v = lookup("lexicon")) cfg.lexicon_path = *v;
  if (auto v = lookup("emoji_lexicon")) cfg.emoji_path = *v;
  if (auto v = lookup("templates"); v && !v->empty()) cfg.template_path = *v;
  if (auto v = lookup("cors_allowlist")) cfg.cors_allowlist = split_list(*v);
  if (auto v = lookup("max_text_bytes")) cfg.max_text_bytes = parse_number<std::size_t>("max_text_bytes", *v);
  if (auto v = lookup("worker_threads")) cfg.worker_threads = parse_number<std::size_t>("worker_threads", *v);
  if (auto v = lookup("shutdown_deadline_ms")) {
    cfg.shutdown_deadline = std::chrono::milliseconds(parse_number<long>("shutdown_deadline_ms", *v));
  }

  try {
    cfg.backend.validate();
    gating::validate(cfg.gating);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (cfg.max_text_bytes == 0) throw ConfigError("max_text_bytes must be positive");
  if (cfg.worker_threads == 0) throw ConfigError("worker_threads must be positive");
  if (std::ifstream probe(cfg.lexicon_path); !probe) {
    throw ConfigError("lexicon file is not readable: " + cfg.lexicon_path.string());
  }
  return cfg;
}

}  // namespace proxyllm::cli
