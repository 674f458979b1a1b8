#include "chartbench/gateway.hpp"

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "nlohmann/json.hpp"

#include "chartbench/error.hpp"

namespace chartbench {
namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string to_base64(const std::vector<std::uint8_t>& bytes) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    std::uint32_t chunk = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out.push_back(kAlphabet[(chunk >> 18) & 0x3f]);
    out.push_back(kAlphabet[(chunk >> 12) & 0x3f]);
    out.push_back(kAlphabet[(chunk >> 6) & 0x3f]);
    out.push_back(kAlphabet[chunk & 0x3f]);
  }
  if (i + 1 == bytes.size()) {
    std::uint32_t chunk = bytes[i] << 16;
    out.push_back(kAlphabet[(chunk >> 18) & 0x3f]);
    out.push_back(kAlphabet[(chunk >> 12) & 0x3f]);
    out += "==";
  } else if (i + 2 == bytes.size()) {
    std::uint32_t chunk = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out.push_back(kAlphabet[(chunk >> 18) & 0x3f]);
    out.push_back(kAlphabet[(chunk >> 12) & 0x3f]);
    out.push_back(kAlphabet[(chunk >> 6) & 0x3f]);
    out += "=";
  }
  return out;
}

// Splits "http(s)://host[:port]/prefix" into the client target and path prefix.
struct ParsedUrl {
  std::string host_part;  // scheme://host:port
  std::string path_prefix;
};

ParsedUrl parse_base_url(const std::string& url) {
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    raise(Errc::MissingEndpoint, "endpoint URL needs a scheme: " + url);
  }
  std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, ""};
  std::string prefix = url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, path_start), prefix};
}

// Reads a template file, stripping leading '#' metadata lines.
std::string load_template_file(const std::filesystem::path& path, std::string* version_out) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "missing prompt template: " + path.string());
  std::string body, line;
  bool in_header = true;
  while (std::getline(in, line)) {
    if (in_header && !line.empty() && line[0] == '#') {
      std::string meta = lower(line);
      std::size_t at = meta.find("version:");
      if (at != std::string::npos && version_out) {
        *version_out = trim(line.substr(at + 8));
      }
      continue;
    }
    in_header = false;
    body += line;
    body += '\n';
  }
  while (!body.empty() && (body.front() == '\n')) body.erase(body.begin());
  while (!body.empty() && body.back() == '\n') body.pop_back();
  return body;
}

std::string substitute_once(std::string text, std::string_view placeholder,
                            const std::string& value, const char* what) {
  std::size_t first = text.find(placeholder);
  if (first == std::string::npos) {
    raise(Errc::MissingPlaceholder, std::string(what) + " placeholder missing from template");
  }
  if (text.find(placeholder, first + placeholder.size()) != std::string::npos) {
    raise(Errc::MissingPlaceholder, std::string(what) + " placeholder appears more than once");
  }
  text.replace(first, placeholder.size(), value);
  return text;
}

std::vector<std::string> split_semicolons(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(';', start);
    if (end == std::string_view::npos) end = text.size();
    std::string entry = trim(text.substr(start, end - start));
    if (!entry.empty()) out.push_back(std::move(entry));
    start = end + 1;
  }
  return out;
}

}  // namespace

ServiceConfig make_service_config(std::string base_url, std::string model) {
  ServiceConfig cfg;
  cfg.base_url = std::move(base_url);
  cfg.model = std::move(model);
  if (const char* key = std::getenv("CHARTBENCH_API_KEY")) cfg.api_key = key;
  return cfg;
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  PromptTemplates t;
  t.universal = load_template_file(dir / "universal.txt", &t.version);
  t.bar = load_template_file(dir / "bar.txt", nullptr);
  t.line = load_template_file(dir / "line.txt", nullptr);
  t.pie = load_template_file(dir / "pie.txt", nullptr);
  t.rowcol = load_template_file(dir / "rowcol.txt", nullptr);
  return t;
}

const std::string& PromptTemplates::for_chart(ChartType type) const {
  switch (type) {
    case ChartType::pie: return pie;
    case ChartType::line: return line;
    case ChartType::bar: return bar;
  }
  return bar;
}

PromptPayload build_qa_prompt(const PromptTemplates& templates, ChartType type,
                              const std::string& table_text, const std::string& question) {
  PromptPayload payload;
  payload.system_text = templates.universal;
  std::string user = templates.for_chart(type);
  user = substitute_once(std::move(user), "{{table}}", table_text, "{{table}}");
  user = substitute_once(std::move(user), "{{question}}", question, "{{question}}");
  payload.user_text = std::move(user);
  return payload;
}

PromptPayload build_rowcol_prompt(const PromptTemplates& templates, const Image& image) {
  PromptPayload payload;
  payload.system_text = templates.universal;
  payload.user_text = templates.rowcol;
  payload.image = image;
  return payload;
}

RowColAnnotation parse_rowcol_response(const std::string& text) {
  std::optional<std::vector<std::string>> rows, cols;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::string folded = lower(trim(line));
    if (!rows && folded.rfind("rows:", 0) == 0) {
      rows = split_semicolons(trim(line).substr(5));
    } else if (!cols && folded.rfind("columns:", 0) == 0) {
      cols = split_semicolons(trim(line).substr(8));
    } else if (!cols && folded.rfind("cols:", 0) == 0) {
      cols = split_semicolons(trim(line).substr(5));
    }
  }
  if (!rows || !cols) {
    raise(Errc::UnparseableResponse,
          std::string("completion lacks a ") + (!rows ? "ROWS:" : "COLS:") + " line");
  }
  RowColAnnotation ann;
  ann.rows = std::move(*rows);
  ann.cols = std::move(*cols);
  ann.origin = AnnotationOrigin::lmm_extracted;
  return ann;
}

LmmResponse chat(const PromptPayload& payload, const ServiceConfig& config) {
  if (config.base_url.empty()) {
    raise(Errc::MissingEndpoint, "no endpoint configured and no fixtures supplied");
  }
  ParsedUrl url = parse_base_url(config.base_url);

  nlohmann::json body;
  body["model"] = payload.model_name.empty() ? config.model : payload.model_name;
  body["temperature"] = payload.temperature;
  body["max_tokens"] = payload.max_tokens;
  nlohmann::json messages = nlohmann::json::array();
  if (!payload.system_text.empty()) {
    messages.push_back({{"role", "system"}, {"content", payload.system_text}});
  }
  if (payload.image) {
    nlohmann::json parts = nlohmann::json::array();
    parts.push_back({{"type", "text"}, {"text", payload.user_text}});
    parts.push_back(
        {{"type", "image_url"},
         {"image_url",
          {{"url", "data:image/png;base64," + to_base64(encode_png(*payload.image))}}}});
    messages.push_back({{"role", "user"}, {"content", std::move(parts)}});
  } else {
    messages.push_back({{"role", "user"}, {"content", payload.user_text}});
  }
  body["messages"] = std::move(messages);
  const std::string body_text = body.dump();

  httplib::Client client(url.host_part);
  client.set_connection_timeout(config.timeout_sec, 0);
  client.set_read_timeout(config.timeout_sec, 0);
  client.set_write_timeout(config.timeout_sec, 0);
  httplib::Headers headers;
  if (!config.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config.api_key);
  }
  const std::string path = url.path_prefix + "/chat/completions";

  const int max_attempts = std::max(1, config.max_attempts);
  int status = 0;
  httplib::Error last_error = httplib::Error::Success;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(config.backoff_base_ms << (attempt - 2)));
    }
    auto started = std::chrono::steady_clock::now();
    httplib::Result res = client.Post(path, headers, body_text, "application/json");
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - started)
                       .count();

    if (!res) {
      last_error = res.error();
      status = 0;
      continue;  // transport problem: retry
    }
    status = res->status;
    if (status == 401 || status == 403) {
      raise(Errc::AuthError, "HTTP " + std::to_string(status) + " from " + config.base_url);
    }
    if (status == 429 || status >= 500) continue;  // transient: retry
    if (status != 200) {
      raise(Errc::ServerError, "HTTP " + std::to_string(status) + ": " + res->body);
    }

    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      raise(Errc::MalformedServerReply, std::string("invalid JSON body: ") + e.what());
    }
    if (!doc.contains("choices") || !doc.at("choices").is_array() || doc.at("choices").empty()) {
      raise(Errc::MalformedServerReply, "no choices in completion");
    }
    const nlohmann::json& choice = doc.at("choices").at(0);
    LmmResponse out;
    try {
      out.text = choice.at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      raise(Errc::MalformedServerReply, "choice carries no message content");
    }
    out.finish_reason = choice.value("finish_reason", "stop");
    if (doc.contains("usage")) {
      const nlohmann::json& usage = doc.at("usage");
      out.usage.prompt_tokens = usage.value("prompt_tokens", 0);
      out.usage.completion_tokens = usage.value("completion_tokens", 0);
      out.usage.total_tokens = usage.value("total_tokens", 0);
    }
    out.latency_ms = static_cast<int>(elapsed);
    out.attempts = attempt;
    return out;
  }

  if (status == 429) {
    raise(Errc::RateLimited, "still rate limited after " + std::to_string(max_attempts) +
                                 " attempts against " + config.base_url);
  }
  if (status >= 500) {
    raise(Errc::ServerError, "HTTP " + std::to_string(status) + " after " +
                                 std::to_string(max_attempts) + " attempts");
  }
  if (last_error == httplib::Error::ConnectionTimeout || last_error == httplib::Error::Read ||
      last_error == httplib::Error::Write) {
    raise(Errc::Timeout, "no reply from " + config.base_url + " after " +
                             std::to_string(max_attempts) + " attempts");
  }
  raise(Errc::TransportError, "cannot reach " + config.base_url + " (" +
                                  httplib::to_string(last_error) + ")");
}

std::string extract_answer(const std::string& completion) {
  std::istringstream lines(completion);
  std::string line, last;
  while (std::getline(lines, line)) {
    std::string t = trim(line);
    if (!t.empty()) last = std::move(t);
  }
  if (last.empty()) raise(Errc::EmptyCompletion, "completion has no non-empty line");
  std::string folded = lower(last);
  if (folded.rfind("answer:", 0) == 0) {
    last = trim(last.substr(7));
    if (last.empty()) raise(Errc::EmptyCompletion, "empty text after ANSWER:");
  }
  return last;
}

std::string answer_question(const Image& image, const Table& table, const std::string& question,
                            ChartType type, const PromptTemplates& templates,
                            const ServiceConfig& config) {
  PromptPayload payload = build_qa_prompt(templates, type, serialize_linearized(table), question);
  payload.image = image;
  LmmResponse response = chat(payload, config);
  return extract_answer(response.text);
}

}  // namespace chartbench
