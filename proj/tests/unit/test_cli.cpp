#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "proxyllm/cli.hpp"
#include "proxyllm/stub_backend.hpp"
#include "test_support.hpp"

namespace proxyllm::cli {
namespace {

using nlohmann::json;
using testing::StubBackend;
using testing::StubReply;

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(std::vector<std::string> args, std::map<std::string, std::string> env = {},
                  std::string input = {}) {
  args.insert(args.begin(), "proxyllm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out;
  std::ostringstream err;
  const EnvLookup lookup = [env](const std::string& name) -> std::optional<std::string> {
    if (auto it = env.find(name); it != env.end()) return it->second;
    return std::nullopt;
  };
  const int code = run(static_cast<int>(argv.size()), argv.data(), in, out, err, lookup);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() : path_(std::filesystem::temp_directory_path() / ("proxyllm-cli-" + std::to_string(::getpid()))) {
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::filesystem::path write(const std::string& name, const std::string& content) const {
    std::ofstream(path_ / name) << content;
    return path_ / name;
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

TEST(Config, Defaults) {
  const auto cfg = resolve_config({}, {}, {});
  EXPECT_EQ(cfg.listen_host, "127.0.0.1");
  EXPECT_EQ(cfg.listen_port, 8787);
  EXPECT_EQ(cfg.backend.model_name, "llama3.1:8b");
  EXPECT_EQ(cfg.backend.base_url, "http://127.0.0.1:11434");
  EXPECT_DOUBLE_EQ(cfg.gating.transform_below, -0.05);
  EXPECT_DOUBLE_EQ(cfg.gating.transform_above, 1.0);
  EXPECT_EQ(cfg.cors_allowlist, (std::vector<std::string>{"*"}));
  EXPECT_FALSE(cfg.template_path.has_value());
}

TEST(Config, LayerPrecedence) {
  const ConfigLayer file{{"model", "file-model"}, {"max_retries", "3"}, {"transform_below", "-0.2"},
                         {"listen", "0.0.0.0:9000"}};
  const ConfigLayer env{{"model", "env-model"}, {"max_retries", "2"}};
  const ConfigLayer cli{{"model", "cli-model"}};
  const auto cfg = resolve_config(cli, env, file);
  EXPECT_EQ(cfg.backend.model_name, "cli-model");
  EXPECT_EQ(cfg.backend.max_retries, 2);
  EXPECT_DOUBLE_EQ(cfg.gating.transform_below, -0.2);
  EXPECT_EQ(cfg.listen_host, "0.0.0.0");
  EXPECT_EQ(cfg.listen_port, 9000);
  EXPECT_EQ(cfg.backend.max_in_flight, 4);
}

TEST(Config, EnvNames) {
  EXPECT_EQ(env_name("backend_url"), "PROXYLLM_BACKEND_URL");
  const auto layer = env_layer([](const std::string& n) -> std::optional<std::string> {
    if (n == "PROXYLLM_TRANSFORM_BELOW") return "-0.3";
    return std::nullopt;
  });
  EXPECT_EQ(layer, (ConfigLayer{{"transform_below", "-0.3"}}));
}

TEST(Config, InvalidValues) {
  EXPECT_THROW(resolve_config({{"listen", "127.0.0.1:0"}}, {}, {}), ConfigError);
  EXPECT_THROW(resolve_config({{"listen", "localhost"}}, {}, {}), ConfigError);
  EXPECT_THROW(resolve_config({{"max_retries", "two"}}, {}, {}), ConfigError);
  EXPECT_THROW(resolve_config({{"transform_below", "0.5"}, {"transform_above", "0.1"}}, {}, {}), ConfigError);
  EXPECT_THROW(resolve_config({{"backend_url", "ftp://x"}}, {}, {}), ConfigError);
  EXPECT_THROW(resolve_config({{"lexicon", "/nonexistent/lexicon.txt"}}, {}, {}), ConfigError);
  EXPECT_THROW(resolve_config({{"max_in_flight", "0"}}, {}, {}), ConfigError);
}

TEST(Config, FileLayer) {
  TempDir dir;
  const auto good = dir.write("good.conf", "# sample\nmodel = m1\ncors_allowlist = a, b ,,c\n");
  EXPECT_EQ(file_layer(good).at("model"), "m1");
  EXPECT_EQ(resolve_config({}, {}, file_layer(good)).cors_allowlist, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_THROW(file_layer(dir.write("bad.conf", "colour = blue\n")), ConfigError);
  EXPECT_THROW(file_layer(dir.path() / "absent.conf"), ConfigError);
}

TEST(Config, ShippedSampleConfigParses) {
  const auto cfg = resolve_config({}, {}, file_layer(test::data_dir() / "proxyllm.conf"));
  EXPECT_EQ(cfg.backend.model_name, "llama3.1:8b");
}

TEST(Cli, ScoreAnchor) {
  const auto r = run_cli({"score", "VADER is smart, handsome, and funny."});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(json::parse(r.out)["compound"].get<double>(), 0.8316320352807864, 1e-12);
}

TEST(Cli, ScoreFromStdin) {
  const auto r = run_cli({"score", "-"}, {}, "This is the WORST service ever!!!\n");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(json::parse(r.out)["compound"].get<double>(), -0.7723338421794544, 1e-12);
}

TEST(Cli, TransformBypassNeedsNoBackend) {
  const auto r = run_cli({"transform", "ok", "--preset", "positive", "--backend-url", "http://127.0.0.1:9"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["bypassed"], true);
  EXPECT_EQ(j["bypass_reason"], "in_neutral_band");
  EXPECT_EQ(j["transformed_text"], "ok");
}

TEST(Cli, TransformPrecedenceAcrossAllFourLayers) {
  StubBackend stub;
  stub.set_default_reply(StubReply::text("Could you help me?"));
  TempDir dir;
  const auto conf = dir.write("p.conf", "model = file-model\nbackend_url = http://127.0.0.1:9\n");
  const std::map<std::string, std::string> env{{"PROXYLLM_CONFIG", conf.string()},
                                               {"PROXYLLM_MODEL", "env-model"},
                                               {"PROXYLLM_BACKEND_URL", stub.base_url()}};
  const auto model_used = [&](std::vector<std::string> extra) {
    std::vector<std::string> args{"transform", "I hate this."};
    args.insert(args.end(), extra.begin(), extra.end());
    const auto r = run_cli(args, env);
    EXPECT_EQ(r.code, 0) << r.err;
    return json::parse(r.out)["model_used"].get<std::string>();
  };
  EXPECT_EQ(model_used({}), "env-model");
  EXPECT_EQ(model_used({"--model", "cli-model"}), "cli-model");
  const auto body = json::parse(stub.requests().back().body);
  EXPECT_EQ(body["model"], "cli-model");

  auto env_without_model = env;
  env_without_model.erase("PROXYLLM_MODEL");
  const auto r = run_cli({"transform", "I hate this."}, env_without_model);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["model_used"], "file-model");

  env_without_model.erase("PROXYLLM_CONFIG");
  const auto d = run_cli({"transform", "I hate this."}, env_without_model);
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_EQ(json::parse(d.out)["model_used"], "llama3.1:8b");
}

TEST(Cli, TransformCustomPreset) {
  StubBackend stub;
  const auto r = run_cli({"transform", "This is terrible.", "--preset", "custom", "--custom", "formal",
                          "--backend-url", stub.base_url()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto prompt = json::parse(stub.requests().at(0).body)["prompt"].get<std::string>();
  EXPECT_TRUE(prompt.ends_with("to be more formal"));
}

TEST(Cli, TransformDegradesWhenBackendIsDown) {
  const auto r = run_cli({"transform", "This is terrible.", "--backend-url", "http://127.0.0.1:9",
                          "--max-retries", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["degraded"], true);
  EXPECT_EQ(j["transformed_text"], "This is terrible.");
}

TEST(Cli, EvalOnBundledDataset) {
  TempDir dir;
  const auto report_path = dir.path() / "report.json";
  const auto r = run_cli({"eval", "--dataset", (test::data_dir() / "eval" / "negative_inquiries.jsonl").string(),
                          "--report", report_path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.starts_with("Scorer | Original | Transferred |    n\n"));
  const auto report = json::parse(test::read_file(report_path));
  EXPECT_LE(report["per_scorer"]["local"]["mean_original"].get<double>(), -0.30);
  EXPECT_GE(report["per_scorer"]["local"]["mean_transferred"].get<double>(), 0.30);
}

TEST(Cli, EvalGenerateWithJudge) {
  StubBackend generator;
  generator.set_default_reply(StubReply::text("I would appreciate your help, thank you!"));
  StubBackend judge;
  judge.set_default_reply(StubReply::text("0.5"));
  TempDir dir;
  const auto dataset = dir.write("d.jsonl", "{\"id\":\"1\",\"original\":\"This is awful.\"}\n");
  const auto written = dir.path() / "filled.jsonl";
  const auto r = run_cli({"eval", "--dataset", dataset.string(), "--generate", "--backend-url", generator.base_url(),
                          "--judge", judge.base_url(), "--judge-model", "judge-m", "--write-dataset",
                          written.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("judge-m@127.0.0.1:" + std::to_string(judge.port())), std::string::npos);
  EXPECT_NE(test::read_file(written).find("I would appreciate your help"), std::string::npos);
  EXPECT_EQ(json::parse(judge.requests().at(0).body)["model"], "judge-m");
}

TEST(Cli, EvalMissingDatasetIsRuntimeError) {
  const auto r = run_cli({"eval", "--dataset", "missing.jsonl"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("missing.jsonl"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  auto r = run_cli({"score", "x", "--bogus"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run_cli({}).code, 1);
  EXPECT_EQ(run_cli({"transform", "x", "--preset", "angry"}).code, 1);
  EXPECT_EQ(run_cli({"transform", "x", "--custom", "formal"}).code, 1);
  EXPECT_EQ(run_cli({"--transform-below", "abc", "score", "x"}).code, 1);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

}  // namespace
}  // namespace proxyllm::cli
