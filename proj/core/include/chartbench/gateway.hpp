#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "chartbench/chart.hpp"
#include "chartbench/image.hpp"
#include "chartbench/preprocess.hpp"
#include "chartbench/table.hpp"

namespace chartbench {

inline constexpr double kDefaultTemperature = 0.1;
inline constexpr int kDefaultMaxTokens = 1024;

// Fully assembled request for a vision chat model. Images travel as base64
// data URIs inside the user message.
struct PromptPayload {
  std::string system_text;
  std::string user_text;
  std::optional<Image> image;
  std::string model_name;  // empty: use the endpoint's configured model
  double temperature = kDefaultTemperature;
  int max_tokens = kDefaultMaxTokens;
};

struct TokenUsage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
  int total_tokens = 0;
};

struct LmmResponse {
  std::string text;
  std::string finish_reason;
  TokenUsage usage;
  int latency_ms = 0;
  int attempts = 1;
};

// Endpoint settings. The credential comes exclusively from the
// CHARTBENCH_API_KEY environment variable.
struct ServiceConfig {
  std::string base_url;  // e.g. https://api.example.com/v1
  std::string model;
  std::string api_key;
  int timeout_sec = 60;
  int max_attempts = 3;
  int backoff_base_ms = 500;
  int max_in_flight = 4;
};

// Fills api_key from the environment.
ServiceConfig make_service_config(std::string base_url, std::string model);

// Prompt text assets. Files live in one directory: universal.txt (system
// preamble), bar.txt / line.txt / pie.txt (chart instructions with {{table}}
// and {{question}} placeholders), rowcol.txt (row/column extraction). Leading
// '#' metadata lines are stripped; a "# version:" line is recorded.
struct PromptTemplates {
  std::string version;
  std::string universal;
  std::string bar;
  std::string line;
  std::string pie;
  std::string rowcol;

  static PromptTemplates load(const std::filesystem::path& dir);
  const std::string& for_chart(ChartType type) const;
};

// Universal preamble as the system message; the chart-type instruction block
// with the serialized table and the question substituted exactly once each as
// the user message.
PromptPayload build_qa_prompt(const PromptTemplates& templates, ChartType type,
                              const std::string& table_text, const std::string& question);

// Asks the model for `ROWS: a; b` / `COLS: x; y` lines describing the chart.
PromptPayload build_rowcol_prompt(const PromptTemplates& templates, const Image& image);

// Extracts the ROWS/COLS lines (case-insensitive) from a completion; entries
// split on ';' and trimmed, empties dropped.
RowColAnnotation parse_rowcol_response(const std::string& text);

// OpenAI-compatible /v1/chat/completions call with retry on 429/5xx/timeouts
// (exponential backoff, cfg.max_attempts total attempts). 401/403 fail
// immediately. Transport failures always surface as errors, never as
// fabricated responses.
LmmResponse chat(const PromptPayload& payload, const ServiceConfig& config);

// The final non-empty completion line, with an "ANSWER:" prefix stripped.
std::string extract_answer(const std::string& completion);

// Full QA round trip: serialize the table, build the prompt, attach the
// chart image, call the model, extract the answer line.
std::string answer_question(const Image& image, const Table& table, const std::string& question,
                            ChartType type, const PromptTemplates& templates,
                            const ServiceConfig& config);

}  // namespace chartbench
