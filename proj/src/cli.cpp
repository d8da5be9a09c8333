#include "proxyllm/cli.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "proxyllm/evaluator.hpp"
#include "proxyllm/http_server.hpp"
#include "proxyllm/prompting.hpp"
#include "proxyllm/sentiment.hpp"
#include "proxyllm/service.hpp"
#include "proxyllm/wire.hpp"

namespace proxyllm::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedResources {
  sentiment::Lexicon lexicon;
  prompting::PromptBuilder prompts;
};

LoadedResources load_resources(const AppConfig& cfg) {
  auto lexicon = sentiment::load_lexicon_file(cfg.lexicon_path);
  if (std::ifstream probe(cfg.emoji_path); probe) {
    lexicon.set_emoji_descriptions(sentiment::load_emoji_descriptions(probe));
  }
  prompting::PromptTemplates templates;
  if (cfg.template_path) templates = prompting::load_templates_file(*cfg.template_path);
  return {std::move(lexicon), prompting::PromptBuilder(std::move(templates))};
}

service::PipelineOptions pipeline_options(const AppConfig& cfg) {
  service::PipelineOptions opts;
  opts.policy = cfg.gating;
  opts.max_text_bytes = cfg.max_text_bytes;
  return opts;
}

std::string read_text_arg(const std::string& arg, std::istream& in) {
  if (arg != "-") return arg;
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  // Piped input normally ends with one newline that is not part of the message.
  if (text.ends_with("\r\n")) {
    text.resize(text.size() - 2);
  } else if (text.ends_with('\n')) {
    text.pop_back();
  }
  return text;
}

prompting::TonePreset make_preset(const std::string& name, const std::optional<std::string>& custom) {
  const auto kind = prompting::preset_kind_from_string(name);
  if (!kind) throw CLI::ValidationError("--preset", "unknown preset '" + name + "'");
  switch (*kind) {
    case prompting::PresetKind::Original: return prompting::TonePreset::original();
    case prompting::PresetKind::Neutral: return prompting::TonePreset::neutral();
    case prompting::PresetKind::Positive: return prompting::TonePreset::positive();
    case prompting::PresetKind::Custom:
      return custom ? prompting::TonePreset::custom(*custom) : prompting::TonePreset::custom();
  }
  return prompting::TonePreset::positive();
}

int serve(const AppConfig& cfg, std::ostream& out) {
  // Block termination signals before any worker thread exists so that only
  // sigwait below receives them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto res = load_resources(cfg);
  llm::OllamaClient backend(cfg.backend);
  service::Pipeline pipeline(res.lexicon, res.prompts, backend, pipeline_options(cfg));
  service::ServerConfig server_cfg;
  server_cfg.host = cfg.listen_host;
  server_cfg.port = cfg.listen_port;
  server_cfg.cors_allowlist = cfg.cors_allowlist;
  server_cfg.worker_threads = cfg.worker_threads;
  server_cfg.shutdown_deadline = cfg.shutdown_deadline;
  service::GatewayServer server(pipeline, server_cfg);
  server.start();
  out << "proxyllm listening on " << server.base_url() << " (backend " << cfg.backend.base_url << ", model "
      << cfg.backend.model_name << ")" << std::endl;

  int received = 0;
  sigwait(&signals, &received);
  out << "shutting down" << std::endl;
  if (!server.stop()) throw RuntimeFailure("in-flight requests did not finish before the shutdown deadline");
  return kExitOk;
}

int score(const AppConfig& cfg, const std::string& text, std::ostream& out) {
  const auto res = load_resources(cfg);
  out << wire::to_json(sentiment::analyze(text, res.lexicon)).dump() << '\n';
  return kExitOk;
}

int transform(const AppConfig& cfg, const std::string& text, const prompting::TonePreset& preset, bool force,
              std::ostream& out) {
  auto res = load_resources(cfg);
  llm::OllamaClient backend(cfg.backend);
  const service::Pipeline pipeline(res.lexicon, res.prompts, backend, pipeline_options(cfg));
  service::TransformRequest req{text, preset, force, std::nullopt};
  try {
    out << wire::to_json(pipeline.transform(req)).dump() << '\n';
  } catch (const service::RequestError& e) {
    throw RuntimeFailure(e.what());
  }
  return kExitOk;
}

struct EvalArgs {
  std::string dataset;
  bool generate = false;
  std::vector<std::string> judges;
  std::optional<std::string> judge_model;
  std::optional<std::string> report_path;
  std::optional<std::string> write_dataset;
  std::string preset = "positive";
  std::optional<std::string> custom;
  bool bare_judge_prompt = false;
  std::size_t parallelism = 4;
};

int evaluate(const AppConfig& cfg, const EvalArgs& args, std::ostream& out, std::ostream& err) {
  auto res = load_resources(cfg);
  auto records = eval::load_dataset_file(args.dataset);

  if (args.generate) {
    llm::OllamaClient backend(cfg.backend);
    const service::Pipeline pipeline(res.lexicon, res.prompts, backend, pipeline_options(cfg));
    auto ensured = eval::ensure_transferred(std::move(records), pipeline, make_preset(args.preset, args.custom));
    for (const auto& f : ensured.failures) err << "generation failed for '" << f.id << "': " << f.reason << '\n';
    if (!ensured.failures.empty()) {
      throw RuntimeFailure(std::to_string(ensured.failures.size()) + " record(s) could not be transferred");
    }
    records = std::move(ensured.records);
  }
  if (args.write_dataset) {
    std::ofstream dump(*args.write_dataset);
    if (!dump) throw RuntimeFailure("cannot write " + *args.write_dataset);
    eval::write_dataset(dump, records);
  }

  std::vector<std::unique_ptr<llm::OllamaClient>> judge_clients;
  std::vector<std::unique_ptr<eval::Scorer>> scorers;
  scorers.push_back(std::make_unique<eval::LocalScorer>(res.lexicon));
  for (const auto& url : args.judges) {
    llm::BackendConfig judge_cfg = cfg.backend;
    judge_cfg.base_url = url;
    if (args.judge_model) judge_cfg.model_name = *args.judge_model;
    judge_clients.push_back(std::make_unique<llm::OllamaClient>(judge_cfg));
    const auto ep = llm::Endpoint::parse(url);
    scorers.push_back(std::make_unique<eval::JudgeScorer>(
        judge_cfg.model_name + "@" + ep.host + ":" + std::to_string(ep.port), *judge_clients.back(), res.prompts,
        eval::JudgeOptions{!args.bare_judge_prompt}));
  }
  std::vector<eval::Scorer*> scorer_ptrs;
  for (auto& s : scorers) scorer_ptrs.push_back(s.get());

  const auto report = eval::run_eval(records, scorer_ptrs, args.parallelism);
  out << report.to_table();
  if (args.report_path) {
    std::ofstream report_out(*args.report_path);
    if (!report_out) throw RuntimeFailure("cannot write " + *args.report_path);
    report_out << report.to_json().dump(2) << '\n';
  }
  for (const auto& name : report.scorer_order) {
    if (const auto failures = report.per_scorer.at(name).failures; failures > 0) {
      err << name << ": " << failures << " record(s) could not be scored\n";
    }
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err,
        const EnvLookup& env) {
  CLI::App app{"Sentiment-gated tone rewriting gateway for support inboxes", "proxyllm"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path;
  app.add_option("--config", config_path, "Key/value config file (also PROXYLLM_CONFIG)");

  // Settings collected as raw strings; typed parsing happens in resolve_config.
  struct FlagSpec {
    const char* flag;
    const char* key;
    const char* help;
  };
  static const FlagSpec kFlags[] = {
      {"--listen", "listen", "host:port for serve (default 127.0.0.1:8787)"},
      {"--backend-url", "backend_url", "Generation backend base URL"},
      {"--model", "model", "Backend model name"},
      {"--request-timeout-ms", "request_timeout_ms", "Backend request timeout"},
      {"--max-retries", "max_retries", "Retries on backend timeout/connection failure"},
      {"--max-in-flight", "max_in_flight", "Concurrent backend request limit"},
      {"--transform-below", "transform_below", "Rewrite when compound < this"},
      {"--transform-above", "transform_above", "Rewrite when compound > this"},
      {"--lexicon", "lexicon", "Valence lexicon file"},
      {"--emoji-lexicon", "emoji_lexicon", "Emoji description table"},
      {"--templates", "templates", "Prompt template override file"},
      {"--cors-allowlist", "cors_allowlist", "Comma-separated allowed origins"},
      {"--max-text-bytes", "max_text_bytes", "Request text size cap"},
      {"--worker-threads", "worker_threads", "HTTP worker threads"},
      {"--shutdown-deadline-ms", "shutdown_deadline_ms", "Drain deadline on shutdown"},
  };
  std::map<std::string, std::string> flag_values;
  std::vector<std::pair<std::string, CLI::Option*>> flag_options;
  for (const auto& spec : kFlags) {
    flag_options.emplace_back(spec.key, app.add_option(spec.flag, flag_values[spec.key], spec.help));
  }

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP gateway");

  std::string score_text;
  auto* score_cmd = app.add_subcommand("score", "Print the sentiment of a text as JSON");
  score_cmd->add_option("text", score_text, "Text to score, or - for standard input")->required();

  std::string transform_text;
  std::string preset_name = "positive";
  std::optional<std::string> custom_param;
  bool force = false;
  auto* transform_cmd = app.add_subcommand("transform", "Run the gateway pipeline once and print the result");
  transform_cmd->add_option("text", transform_text, "Text to rewrite, or - for standard input")->required();
  transform_cmd->add_option("--preset", preset_name, "original|neutral|positive|custom")
      ->check(CLI::IsMember({"original", "neutral", "positive", "custom"}));
  transform_cmd->add_option("--custom", custom_param, "Custom tone parameter (with --preset custom)");
  transform_cmd->add_flag("--force", force, "Rewrite regardless of the gating thresholds");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Score original/transferred pairs and print a sentiment-shift table");
  eval_cmd->add_option("--dataset", eval_args.dataset, "Newline-delimited JSON dataset")->required();
  eval_cmd->add_flag("--generate", eval_args.generate, "Fill missing transferred texts through the backend");
  eval_cmd->add_option("--judge", eval_args.judges, "LLM judge endpoint base URL (repeatable)");
  eval_cmd->add_option("--judge-model", eval_args.judge_model, "Model name for judges (default: --model)");
  eval_cmd->add_option("--report", eval_args.report_path, "Write the JSON report here");
  eval_cmd->add_option("--write-dataset", eval_args.write_dataset, "Write the (generated) dataset here");
  eval_cmd->add_option("--preset", eval_args.preset, "Preset used with --generate")
      ->check(CLI::IsMember({"neutral", "positive", "custom"}));
  eval_cmd->add_option("--custom", eval_args.custom, "Custom parameter used with --generate");
  eval_cmd->add_flag("--bare-judge-prompt", eval_args.bare_judge_prompt, "Send the judge prompt without the reply-format hint");
  eval_cmd->add_option("--parallelism", eval_args.parallelism, "Concurrent judge requests")
      ->check(CLI::Range(1, 64));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  AppConfig cfg;
  try {
    ConfigLayer cli_layer;
    for (const auto& [key, opt] : flag_options) {
      if (opt->count() > 0) cli_layer[key] = flag_values[key];
    }
    if (!config_path) config_path = env("PROXYLLM_CONFIG");
    const ConfigLayer file = config_path ? file_layer(*config_path) : ConfigLayer{};
    cfg = resolve_config(cli_layer, env_layer(env), file);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (serve_cmd->parsed()) return serve(cfg, out);
    if (score_cmd->parsed()) return score(cfg, read_text_arg(score_text, in), out);
    if (transform_cmd->parsed()) {
      if (custom_param && preset_name != "custom") {
        err << "error: --custom requires --preset custom\n";
        return kExitUsage;
      }
      return transform(cfg, read_text_arg(transform_text, in), make_preset(preset_name, custom_param), force, out);
    }
    if (eval_cmd->parsed()) return evaluate(cfg, eval_args, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace proxyllm::cli
