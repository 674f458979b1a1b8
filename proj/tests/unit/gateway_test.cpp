#include "chartbench/gateway.hpp"

#include <atomic>
#include <chrono>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "nlohmann/json.hpp"

#include "chartbench/error.hpp"
#include "test_support.hpp"

using namespace chartbench;
namespace ct = chartbench::testing;

namespace {

PromptTemplates test_templates() { return PromptTemplates::load(CHARTBENCH_PROMPT_DIR); }

std::string completion_body(const std::string& text) {
  nlohmann::json doc;
  doc["choices"] = {{{"message", {{"role", "assistant"}, {"content", text}}},
                     {"finish_reason", "stop"}}};
  doc["usage"] = {{"prompt_tokens", 10}, {"completion_tokens", 5}, {"total_tokens", 15}};
  return doc.dump();
}

// Runs an httplib server on an ephemeral port for the duration of a test.
class StubServer {
 public:
  explicit StubServer(httplib::Server::Handler handler) {
    server_.Post("/v1/chat/completions", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

ServiceConfig fast_config(const std::string& base_url) {
  ServiceConfig cfg;
  cfg.base_url = base_url;
  cfg.model = "stub-model";
  cfg.max_attempts = 3;
  cfg.backoff_base_ms = 10;
  cfg.timeout_sec = 5;
  return cfg;
}

}  // namespace

TEST_CASE("templates load with versions and placeholders") {
  PromptTemplates t = test_templates();
  CHECK(t.version == "1");
  CHECK_FALSE(t.universal.empty());
  CHECK(t.universal.find("#") != 0);  // metadata headers stripped
  for (const std::string* tpl : {&t.bar, &t.line, &t.pie}) {
    CHECK(tpl->find("{{table}}") != std::string::npos);
    CHECK(tpl->find("{{question}}") != std::string::npos);
  }
  CHECK(t.rowcol.find("ROWS:") != std::string::npos);
  CHECK(t.rowcol.find("COLS:") != std::string::npos);
}

TEST_CASE("build_qa_prompt substitutes the table exactly once") {
  PromptTemplates templates = test_templates();
  const std::string table_text = "Entity | Value <0x0A> Asia | 4560.0";
  const std::string question = "Which region is largest?";
  PromptPayload payload = build_qa_prompt(templates, ChartType::bar, table_text, question);

  CHECK(payload.user_text.find("legend") != std::string::npos);
  CHECK(payload.system_text.find("legend") != std::string::npos);
  std::size_t first = payload.user_text.find(table_text);
  REQUIRE(first != std::string::npos);
  CHECK(payload.user_text.find(table_text, first + 1) == std::string::npos);
  CHECK(payload.user_text.find(question) != std::string::npos);
  CHECK(payload.user_text.find("{{table}}") == std::string::npos);
  CHECK(payload.user_text.find("{{question}}") == std::string::npos);
  CHECK(payload.temperature == 0.1);
  CHECK(payload.max_tokens == 1024);

  SUBCASE("deterministic payload bytes") {
    PromptPayload again = build_qa_prompt(templates, ChartType::bar, table_text, question);
    CHECK(again.system_text == payload.system_text);
    CHECK(again.user_text == payload.user_text);
  }
  SUBCASE("each chart type substitutes its own template") {
    CHECK(build_qa_prompt(templates, ChartType::pie, table_text, question).user_text !=
          build_qa_prompt(templates, ChartType::line, table_text, question).user_text);
  }
}

TEST_CASE("build_qa_prompt rejects malformed templates") {
  PromptTemplates broken = test_templates();
  broken.bar = "no placeholders here";
  try {
    build_qa_prompt(broken, ChartType::bar, "t", "q");
    FAIL("expected MissingPlaceholder");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingPlaceholder);
  }
  broken.bar = "{{table}} {{table}} {{question}}";
  CHECK_THROWS_AS(build_qa_prompt(broken, ChartType::bar, "t", "q"), Error);
}

TEST_CASE("build_rowcol_prompt carries the image and the output contract") {
  PromptTemplates templates = test_templates();
  Image img = Image::blank(32, 32, Rgb{1, 2, 3});
  PromptPayload payload = build_rowcol_prompt(templates, img);
  REQUIRE(payload.image.has_value());
  CHECK(payload.image->same_pixels(img));
  CHECK(payload.user_text.find("ROWS:") != std::string::npos);
  CHECK(payload.user_text.find("COLS:") != std::string::npos);
}

TEST_CASE("parse_rowcol_response") {
  SUBCASE("plain two-line form") {
    RowColAnnotation ann = parse_rowcol_response("ROWS: Asia; Africa\nCOLS: Value");
    CHECK(ann.rows == std::vector<std::string>{"Asia", "Africa"});
    CHECK(ann.cols == std::vector<std::string>{"Value"});
    CHECK(ann.origin == AnnotationOrigin::lmm_extracted);
  }
  SUBCASE("prose around the lines still parses") {
    RowColAnnotation ann = parse_rowcol_response(
        "Sure, here is what I can see in the chart.\n\n"
        "rows: 2019; 2020; 2021\n"
        "cols: Revenue; Profit\n\n"
        "Let me know if you need anything else.");
    CHECK(ann.rows == std::vector<std::string>{"2019", "2020", "2021"});
    CHECK(ann.cols == std::vector<std::string>{"Revenue", "Profit"});
  }
  SUBCASE("COLUMNS: spelling and stray semicolons") {
    RowColAnnotation ann = parse_rowcol_response("ROWS: a;; b;\nCOLUMNS: x; ");
    CHECK(ann.rows == std::vector<std::string>{"a", "b"});
    CHECK(ann.cols == std::vector<std::string>{"x"});
  }
  SUBCASE("missing COLS is an error") {
    try {
      parse_rowcol_response("ROWS: a; b");
      FAIL("expected UnparseableResponse");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::UnparseableResponse);
    }
  }
  SUBCASE("round trip through the contract format") {
    RowColAnnotation ann{{"Asia", "Africa"}, {"2020", "2021"}, AnnotationOrigin::lmm_extracted};
    std::string formatted = "ROWS: Asia; Africa\nCOLS: 2020; 2021";
    CHECK(parse_rowcol_response(formatted) == ann);
  }
}

TEST_CASE("extract_answer") {
  CHECK(extract_answer("thinking...\nANSWER: 1.56 billion") == "1.56 billion");
  CHECK(extract_answer("just the value\n\n") == "just the value");
  CHECK(extract_answer("line one\nline two") == "line two");
  CHECK(extract_answer("answer: yes") == "yes");  // prefix is case-insensitive
  try {
    extract_answer("\n  \n");
    FAIL("expected EmptyCompletion");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyCompletion);
  }
}

TEST_CASE("chat echoes the stub completion and records usage") {
  StubServer server([](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body = nlohmann::json::parse(req.body);
    CHECK(body.at("model") == "stub-model");
    CHECK(body.at("temperature") == 0.1);
    CHECK(body.at("messages").size() == 2);
    res.set_content(completion_body("stub says hi"), "application/json");
  });
  PromptPayload payload = build_qa_prompt(test_templates(), ChartType::bar, "t", "q");
  LmmResponse response = chat(payload, fast_config(server.base_url()));
  CHECK(response.text == "stub says hi");
  CHECK(response.finish_reason == "stop");
  CHECK(response.usage.total_tokens == 15);
  CHECK(response.attempts == 1);
  CHECK(response.latency_ms >= 0);
}

TEST_CASE("chat sends the image as a base64 data URI part") {
  std::atomic<bool> saw_image{false};
  StubServer server([&](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body = nlohmann::json::parse(req.body);
    const nlohmann::json& content = body.at("messages").at(1).at("content");
    if (content.is_array()) {
      for (const nlohmann::json& part : content) {
        if (part.at("type") == "image_url") {
          std::string url = part.at("image_url").at("url").get<std::string>();
          saw_image = url.rfind("data:image/png;base64,", 0) == 0;
        }
      }
    }
    res.set_content(completion_body("ok"), "application/json");
  });
  PromptPayload payload = build_rowcol_prompt(test_templates(), Image::blank(16, 16, Rgb{9, 8, 7}));
  chat(payload, fast_config(server.base_url()));
  CHECK(saw_image.load());
}

TEST_CASE("chat retries a 429 and succeeds on the second attempt") {
  std::atomic<int> hits{0};
  StubServer server([&](const httplib::Request&, httplib::Response& res) {
    if (hits.fetch_add(1) == 0) {
      res.status = 429;
      res.set_content("slow down", "text/plain");
    } else {
      res.set_content(completion_body("recovered"), "application/json");
    }
  });
  PromptPayload payload = build_qa_prompt(test_templates(), ChartType::bar, "t", "q");
  LmmResponse response = chat(payload, fast_config(server.base_url()));
  CHECK(response.text == "recovered");
  CHECK(response.attempts == 2);
  CHECK(hits.load() == 2);
}

TEST_CASE("chat raises RateLimited after exhausting retries") {
  std::atomic<int> hits{0};
  StubServer server([&](const httplib::Request&, httplib::Response& res) {
    hits.fetch_add(1);
    res.status = 429;
  });
  PromptPayload payload = build_qa_prompt(test_templates(), ChartType::bar, "t", "q");
  try {
    chat(payload, fast_config(server.base_url()));
    FAIL("expected RateLimited");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::RateLimited);
  }
  CHECK(hits.load() == 3);
}

TEST_CASE("chat never retries a 401") {
  std::atomic<int> hits{0};
  StubServer server([&](const httplib::Request&, httplib::Response& res) {
    hits.fetch_add(1);
    res.status = 401;
  });
  PromptPayload payload = build_qa_prompt(test_templates(), ChartType::bar, "t", "q");
  try {
    chat(payload, fast_config(server.base_url()));
    FAIL("expected AuthError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::AuthError);
  }
  CHECK(hits.load() == 1);
}

TEST_CASE("chat times out against a sleeping server") {
  StubServer server([](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(2500));
    res.set_content(completion_body("too late"), "application/json");
  });
  ServiceConfig cfg = fast_config(server.base_url());
  cfg.timeout_sec = 1;
  cfg.max_attempts = 2;
  PromptPayload payload = build_qa_prompt(test_templates(), ChartType::bar, "t", "q");
  try {
    chat(payload, cfg);
    FAIL("expected Timeout");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Timeout);
  }
}

TEST_CASE("chat surfaces malformed server replies") {
  StubServer server([](const httplib::Request&, httplib::Response& res) {
    res.set_content("not json at all", "application/json");
  });
  PromptPayload payload = build_qa_prompt(test_templates(), ChartType::bar, "t", "q");
  try {
    chat(payload, fast_config(server.base_url()));
    FAIL("expected MalformedServerReply");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MalformedServerReply);
  }
}

TEST_CASE("chat without an endpoint is a deterministic error") {
  PromptPayload payload = build_qa_prompt(test_templates(), ChartType::bar, "t", "q");
  try {
    chat(payload, ServiceConfig{});
    FAIL("expected MissingEndpoint");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingEndpoint);
  }
}

TEST_CASE("answer_question runs the full round trip against a stub") {
  StubServer server([](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body = nlohmann::json::parse(req.body);
    // The serialized table must appear in the text part of the user message.
    std::string text = body.at("messages").at(1).at("content").at(0).at("text");
    CHECK(text.find("Asia | 4560.0") != std::string::npos);
    res.set_content(completion_body("Reasoning about bars...\nANSWER: 4560.0"),
                    "application/json");
  });
  Table table;
  table.col_headers = {"Value"};
  table.rows.push_back({"Asia", {Cell::of("4560.0")}});
  Image chart = Image::blank(32, 32, Rgb{0, 0, 0});
  std::string answer = answer_question(chart, table, "What is Asia?", ChartType::bar,
                                       test_templates(), fast_config(server.base_url()));
  CHECK(answer == "4560.0");
}
