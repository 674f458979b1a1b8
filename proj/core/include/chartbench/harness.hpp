#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlohmann/json_fwd.hpp"

#include "chartbench/dataset.hpp"
#include "chartbench/gateway.hpp"
#include "chartbench/report.hpp"

namespace chartbench {

struct EvalParams {
  double tau = kDefaultTau;
  double theta = kDefaultTheta;
  double tol = kDefaultTolerance;
  bool with_rms = false;
  bool with_bleu = false;
  Split split = Split::test;
};

// Scores one linearized prediction file per chart against the gold tables.
// A missing or unparseable prediction scores (0, 0, 0) and is listed.
MetricReport run_eval_table(const std::filesystem::path& pred_dir, const DatasetIndex& gold,
                            const EvalParams& params);

// Relaxed accuracy per answer kind and overall; a missing prediction counts
// as incorrect and is listed.
MetricReport run_eval_qa(const DatasetIndex& index,
                         const std::map<std::string, std::string>& predictions,
                         const EvalParams& params);

struct PreprocessSummary {
  int charts_total = 0;
  int charts_ok = 0;
  int images_written = 0;
  int sidecars_written = 0;
  std::vector<std::pair<std::string, std::string>> failures;  // chart_id -> error
};

// For every train/val chart with a table: writes <id>.anchor.png,
// <id>.positive.png, <id>.negative.png and <id>.rowcol.json under out_dir.
// Deterministic for a fixed seed; per-chart failures never abort the batch.
PreprocessSummary run_preprocess(const DatasetIndex& index, const std::filesystem::path& out_dir,
                                 std::uint64_t seed, int workers = 1);

struct AskOptions {
  std::optional<std::filesystem::path> fixtures;  // recorded completions, "qid" -> text
  std::optional<std::filesystem::path> tables_dir;  // linearized tables per chart
  std::filesystem::path templates_dir;
  Split split = Split::test;
  int workers = 1;
};

struct AskSummary {
  int answered = 0;
  int skipped = 0;  // already present in the output file
  std::vector<std::pair<std::string, std::string>> failures;  // qid -> error
};

// Answers every test question, resuming from an existing predictions file.
// With fixtures set, completions come from the recorded file and no network
// traffic happens at all.
AskSummary run_ask(const DatasetIndex& index, const ServiceConfig& config,
                   const std::filesystem::path& out_path, const AskOptions& options);

// Predictions file helpers ({"schema_version":1,"predictions":{qid:answer},...}).
std::map<std::string, std::string> load_predictions(const std::filesystem::path& path);

// Atomic write (temp file + rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Reproducibility manifest: parameters, seeds, template versions and metric
// defaults. Contains no timestamps, so identical runs emit identical bytes.
void write_manifest(const std::filesystem::path& path, const std::string& command,
                    const nlohmann::json& params);

}  // namespace chartbench
