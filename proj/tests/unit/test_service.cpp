#include <gtest/gtest.h>

#include <random>
#include <thread>

#include <httplib.h>

#include "net_util.hpp"
#include "proxyllm/http_server.hpp"
#include "proxyllm/service.hpp"
#include "proxyllm/stub_backend.hpp"
#include "proxyllm/wire.hpp"
#include "test_support.hpp"

namespace proxyllm::service {
namespace {

using namespace std::chrono_literals;
using nlohmann::json;
using prompting::TonePreset;
using testing::StubBackend;
using testing::StubReply;

constexpr const char* kRewrite = "I'm having trouble with the product and would appreciate help.";

llm::BackendConfig config_for(const std::string& url) {
  llm::BackendConfig cfg;
  cfg.base_url = url;
  cfg.request_timeout = 2s;
  cfg.retry_backoff = 5ms;
  cfg.max_retries = 0;
  return cfg;
}

class PipelineTest : public ::testing::Test {
 protected:
  PipelineTest() : client(config_for(stub.base_url())), pipeline(test::lexicon(), {}, client) {
    stub.add_rule("I HATE your broken product", StubReply::text(kRewrite));
  }

  StubBackend stub;
  llm::OllamaClient client;
  Pipeline pipeline;
};

TEST_F(PipelineTest, PositiveTextBypasses) {
  const auto r = pipeline.transform({"Thanks, that worked!", TonePreset::positive(), false, std::nullopt});
  EXPECT_TRUE(r.bypassed);
  EXPECT_EQ(r.bypass_reason, gating::Reason::InNeutralBand);
  EXPECT_NEAR(r.compound_score, 0.4925548702193134, 1e-12);
  EXPECT_EQ(r.transformed_text, "Thanks, that worked!");
  EXPECT_FALSE(r.model_used.has_value());
  EXPECT_EQ(stub.generate_calls(), 0u);
}

TEST_F(PipelineTest, NegativeTextIsRewritten) {
  const auto r =
      pipeline.transform({"I HATE your broken product!!!", TonePreset::positive(), false, std::string("req-7")});
  EXPECT_FALSE(r.bypassed);
  EXPECT_FALSE(r.degraded);
  EXPECT_EQ(r.original_text, "I HATE your broken product!!!");
  EXPECT_EQ(r.transformed_text, kRewrite);
  EXPECT_EQ(r.model_used, "llama3.1:8b");
  EXPECT_EQ(r.request_id, "req-7");
  EXPECT_NEAR(r.compound_score, -0.8558635726842712, 1e-12);
  const auto body = json::parse(stub.requests().at(0).body);
  EXPECT_EQ(body["prompt"], prompting::build_prompt("I HATE your broken product!!!", TonePreset::positive()));
}

TEST_F(PipelineTest, OriginalPresetNeverCallsBackend) {
  const auto r = pipeline.transform({"I HATE your broken product!!!", TonePreset::original(), true, std::nullopt});
  EXPECT_TRUE(r.bypassed);
  EXPECT_EQ(r.bypass_reason, gating::Reason::PresetOriginal);
  EXPECT_EQ(stub.generate_calls(), 0u);
}

TEST_F(PipelineTest, ForceRewritesPositiveText) {
  const auto r = pipeline.transform({"Thanks, that worked!", TonePreset::neutral(), true, std::nullopt});
  EXPECT_FALSE(r.bypassed);
  EXPECT_EQ(r.transformed_text, "Thank you for reaching out...");
}

TEST_F(PipelineTest, BackendFailureDegradesToOriginal) {
  StubReply failure = StubReply::text("boom");
  failure.status = 500;
  stub.set_default_reply(failure);
  const auto r = pipeline.transform({"This is awful.", TonePreset::positive(), false, std::nullopt});
  EXPECT_TRUE(r.degraded);
  EXPECT_FALSE(r.bypassed);
  EXPECT_EQ(r.transformed_text, "This is awful.");
  EXPECT_EQ(r.degraded_reason, "backend_status");
}

TEST_F(PipelineTest, RequestValidation) {
  try {
    pipeline.transform({"", TonePreset::positive(), false, std::nullopt});
    FAIL();
  } catch (const RequestError& e) {
    EXPECT_EQ(e.http_status(), 400);
  }
  try {
    pipeline.transform({std::string(kDefaultMaxTextBytes + 1, 'x'), TonePreset::positive(), false, std::nullopt});
    FAIL();
  } catch (const RequestError& e) {
    EXPECT_EQ(e.http_status(), 413);
    EXPECT_EQ(e.code(), "payload_too_large");
  }
  EXPECT_NO_THROW(pipeline.transform({std::string(kDefaultMaxTextBytes, 'x'), TonePreset::original(), false, {}}));
}

TEST_F(PipelineTest, Score) {
  EXPECT_NEAR(pipeline.score("VADER is smart, handsome, and funny.").compound, 0.8316320352807864, 1e-12);
  EXPECT_NEAR(pipeline.score("ok").compound, 0.295958174200194, 1e-12);
  EXPECT_THROW(pipeline.score(""), RequestError);
}

TEST_F(PipelineTest, IdenticalRequestsYieldIdenticalResponses) {
  const TransformRequest req{"I HATE your broken product!!!", TonePreset::positive(), false, std::nullopt};
  auto a = pipeline.transform(req);
  auto b = pipeline.transform(req);
  a.latency = b.latency = 0ms;
  EXPECT_EQ(wire::to_json(a), wire::to_json(b));
}

TEST_F(PipelineTest, HealthProbeIsCached) {
  for (int i = 0; i < 5; ++i) EXPECT_TRUE(pipeline.health().backend_reachable);
  EXPECT_EQ(stub.probe_calls(), 1u);
}

TEST(PipelineHealth, BackendDown) {
  llm::OllamaClient down(config_for("http://127.0.0.1:" + std::to_string(test::closed_port())));
  PipelineOptions options;
  options.health_ttl = 0ms;
  Pipeline pipeline(test::lexicon(), {}, down, options);
  const auto h = pipeline.health();
  EXPECT_EQ(h.status, "ok");
  EXPECT_FALSE(h.backend_reachable);
  EXPECT_EQ(h.model_name, "llama3.1:8b");
}

TEST(PipelineFuzz, OriginalIsPreservedAndIdentitiesHold) {
  StubBackend stub;
  stub.set_default_reply(StubReply::text("A calmer version."));
  StubReply failing = StubReply::text("");
  failing.status = 503;
  stub.add_rule("zz", failing);
  llm::OllamaClient client(config_for(stub.base_url()));
  const Pipeline pipeline(test::lexicon(), {}, client);

  static const char* kWords[] = {"terrible", "great", "zz", "not", "ok", "!!!", "\xF0\x9F\x98\xA1", "help",
                                 "never", "love", "\n", "{TEXT}", "\"quoted\"", "caf\xC3\xA9"};
  std::mt19937_64 rng(5);
  const TonePreset presets[] = {TonePreset::original(), TonePreset::neutral(), TonePreset::positive(),
                                TonePreset::custom("formal")};
  for (int i = 0; i < 200; ++i) {
    std::string text;
    const auto n = 1 + rng() % 8;
    for (std::size_t w = 0; w < n; ++w) text += std::string(kWords[rng() % std::size(kWords)]) + " ";
    const auto r = pipeline.transform({text, presets[rng() % 4], rng() % 4 == 0, std::nullopt});
    ASSERT_EQ(r.original_text, text);
    if (r.bypassed || r.degraded) {
      ASSERT_EQ(r.transformed_text, text);
    }
    if (r.bypassed) {
      ASSERT_FALSE(r.model_used.has_value());
    }
    ASSERT_FALSE(r.bypassed && r.degraded);
  }
}

TEST(Wire, ParseTransformRequest) {
  auto req = wire::parse_transform_request(
      R"({"text":"hi","preset":{"kind":"custom","custom_parameter":" formal "},"force":true,"request_id":"r1"})");
  EXPECT_EQ(req.text, "hi");
  EXPECT_EQ(req.preset, TonePreset::custom("formal"));
  EXPECT_TRUE(req.force);
  EXPECT_EQ(req.request_id, "r1");
  EXPECT_EQ(wire::parse_transform_request(R"({"text":"hi","preset":"neutral"})").preset, TonePreset::neutral());
  EXPECT_EQ(wire::parse_transform_request(R"({"text":"hi"})").preset, TonePreset::positive());

  const auto code_of = [](std::string_view body) {
    try {
      wire::parse_transform_request(body);
    } catch (const RequestError& e) {
      return e.code();
    }
    return std::string("ok");
  };
  EXPECT_EQ(code_of("{not json"), "invalid_json");
  EXPECT_EQ(code_of("[1]"), "invalid_request");
  EXPECT_EQ(code_of(R"({"preset":"positive"})"), "invalid_request");
  EXPECT_EQ(code_of(R"({"text":5})"), "invalid_request");
  EXPECT_EQ(code_of(R"({"text":"x","preset":"angry"})"), "invalid_request");
  EXPECT_EQ(code_of(R"({"text":"x","force":"yes"})"), "invalid_request");
}

TEST(Wire, PresetRoundTrip) {
  for (const auto& p : {TonePreset::original(), TonePreset::neutral(), TonePreset::custom("brief"),
                        TonePreset::custom()}) {
    EXPECT_EQ(wire::preset_from_json(wire::to_json(p)), p);
  }
}

class HttpTest : public ::testing::Test {
 protected:
  HttpTest()
      : client(config_for(stub.base_url())),
        pipeline(test::lexicon(), {}, client),
        server(pipeline, ServerConfig{"127.0.0.1", 0, {"chrome-extension://abc"}, 8, 2s}) {
    stub.add_rule("I HATE your broken product", StubReply::text(kRewrite));
    server.start();
  }
  ~HttpTest() override { server.stop(); }

  httplib::Client http() { return httplib::Client("127.0.0.1", server.port()); }

  StubBackend stub;
  llm::OllamaClient client;
  Pipeline pipeline;
  GatewayServer server;
};

TEST_F(HttpTest, TransformRoundTrip) {
  auto c = http();
  auto res = c.Post("/v1/transform", R"({"text":"I HATE your broken product!!!","preset":{"kind":"positive"}})",
                    "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const auto j = json::parse(res->body);
  EXPECT_EQ(j["transformed_text"], kRewrite);
  EXPECT_EQ(j["bypassed"], false);
  EXPECT_TRUE(j["bypass_reason"].is_null());
  EXPECT_EQ(j["model_used"], "llama3.1:8b");

  res = c.Post("/v1/transform", R"({"text":"...","preset":{"kind":"original"}})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body)["bypass_reason"], "preset_original");
}

TEST_F(HttpTest, ErrorEnvelopes) {
  auto c = http();
  auto res = c.Post("/v1/transform", "{oops", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(json::parse(res->body)["error"]["code"], "invalid_json");

  res = c.Post("/v1/transform", R"({"text":""})", "application/json");
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(json::parse(res->body)["error"]["code"], "invalid_request");

  const json big = {{"text", std::string(kDefaultMaxTextBytes + 10, 'a')}};
  res = c.Post("/v1/transform", big.dump(), "application/json");
  EXPECT_EQ(res->status, 413);
  EXPECT_EQ(json::parse(res->body)["error"]["code"], "payload_too_large");

  res = c.Post("/v1/score", R"({"text":""})", "application/json");
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(json::parse(res->body)["error"]["code"], "empty_text");

  res = c.Get("/v1/nowhere");
  EXPECT_EQ(res->status, 404);
  EXPECT_TRUE(json::parse(res->body).contains("error"));
}

TEST_F(HttpTest, ScoreAndHealth) {
  auto c = http();
  auto res = c.Post("/v1/score", R"({"text":"VADER is smart, handsome, and funny."})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_NEAR(json::parse(res->body)["compound"].get<double>(), 0.8316320352807864, 1e-12);
  for (int i = 0; i < 3; ++i) {
    res = c.Get("/v1/health");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    const auto h = json::parse(res->body);
    EXPECT_EQ(h["backend_reachable"], true);
    EXPECT_EQ(h["model_name"], "llama3.1:8b");
  }
  EXPECT_EQ(stub.probe_calls(), 1u);
}

TEST_F(HttpTest, CorsAllowlist) {
  auto c = http();
  auto res = c.Options("/v1/transform", {{"Origin", "chrome-extension://abc"}});
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "chrome-extension://abc");

  res = c.Post("/v1/score", {{"Origin", "https://evil.example"}}, R"({"text":"hi"})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_FALSE(res->has_header("Access-Control-Allow-Origin"));
}

TEST(HttpServer, StopIsIdempotent) {
  StubBackend stub;
  llm::OllamaClient client(config_for(stub.base_url()));
  Pipeline pipeline(test::lexicon(), {}, client);
  GatewayServer server(pipeline, ServerConfig{"127.0.0.1", 0, {"*"}, 4, 2s});
  server.start();
  EXPECT_GT(server.port(), 0);
  EXPECT_EQ(server.base_url(), "http://127.0.0.1:" + std::to_string(server.port()));
  EXPECT_TRUE(server.stop());
  EXPECT_TRUE(server.stop());
}

}  // namespace
}  // namespace proxyllm::service
