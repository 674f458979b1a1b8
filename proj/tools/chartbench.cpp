#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"

#include "chartbench/dataset.hpp"
#include "chartbench/error.hpp"
#include "chartbench/gateway.hpp"
#include "chartbench/harness.hpp"
#include "chartbench/image.hpp"
#include "chartbench/preprocess.hpp"
#include "chartbench/report.hpp"

namespace fs = std::filesystem;
using namespace chartbench;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitHardFailure = 1;
constexpr int kExitPartial = 2;

fs::path resolve_templates_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("CHARTBENCH_TEMPLATES")) return env;
#ifdef CHARTBENCH_SOURCE_PROMPT_DIR
  if (fs::is_directory(CHARTBENCH_SOURCE_PROMPT_DIR)) return CHARTBENCH_SOURCE_PROMPT_DIR;
#endif
  return "assets/prompts";
}

Split parse_split(const std::string& name) {
  auto split = split_from_name(name);
  if (!split) throw CLI::ValidationError("--split", "expected train, val or test");
  return *split;
}

ServiceConfig service_config_from(const std::string& config_file, const std::string& endpoint,
                                  const std::string& model) {
  ServiceConfig cfg = make_service_config("", "");
  if (!config_file.empty()) {
    std::ifstream in(config_file);
    if (!in) raise(Errc::IoError, "cannot read config file " + config_file);
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, true, true);
    cfg.base_url = doc.value("endpoint", cfg.base_url);
    cfg.model = doc.value("model", cfg.model);
    cfg.timeout_sec = doc.value("timeout_sec", cfg.timeout_sec);
    cfg.max_attempts = doc.value("max_attempts", cfg.max_attempts);
    cfg.max_in_flight = doc.value("max_in_flight", cfg.max_in_flight);
  }
  if (!endpoint.empty()) cfg.base_url = endpoint;
  if (!model.empty()) cfg.model = model;
  return cfg;
}

void emit_report(const MetricReport& report, const std::string& out_path,
                 const std::string& command, const nlohmann::json& params) {
  std::cout << render_report_text(report);
  if (!out_path.empty()) {
    write_file_atomic(out_path, report_to_json(report).dump(2) + "\n");
    write_manifest(out_path + ".manifest.json", command, params);
    std::cout << "report written to " << out_path << "\n";
  }
}

int count_item_errors(const MetricReport& report) {
  int n = 0;
  for (const PerItemScore& item : report.per_item) {
    if (!item.error.empty()) ++n;
  }
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chart-to-table evaluation and preprocessing harness"};
  app.require_subcommand(1);

  std::string dataset_root, out_path, pred_path, tables_dir, fixtures, endpoint, model;
  std::string config_file, templates_flag, split_name_flag = "test", image_path, report_in;
  std::uint64_t seed = 0;
  double tau = kDefaultTau, theta = kDefaultTheta, tol = kDefaultTolerance;
  int workers = 1;
  bool with_rms = false, with_bleu = false;

  auto add_dataset = [&](CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("--dataset", dataset_root, "dataset root directory");
    if (required) opt->required();
  };
  auto add_endpoint_flags = [&](CLI::App* cmd) {
    cmd->add_option("--endpoint", endpoint, "chat completions base URL, e.g. http://host:8000/v1");
    cmd->add_option("--model", model, "model name sent with each request");
    cmd->add_option("--config", config_file, "JSON config file with endpoint/model defaults");
    cmd->add_option("--templates", templates_flag, "prompt template directory");
    cmd->add_option("--fixtures", fixtures, "recorded completions JSON; no network traffic");
  };

  CLI::App* preprocess_cmd =
      app.add_subcommand("preprocess", "render training triples and sidecars");
  add_dataset(preprocess_cmd);
  preprocess_cmd->add_option("--out", out_path, "output directory")->required();
  preprocess_cmd->add_option("--seed", seed, "shuffle seed");
  preprocess_cmd->add_option("--workers", workers, "parallel chart workers");

  CLI::App* eval_table_cmd =
      app.add_subcommand("eval-table", "score linearized table predictions");
  add_dataset(eval_table_cmd);
  eval_table_cmd->add_option("--pred", pred_path, "directory of <chart_id>.txt predictions")
      ->required();
  eval_table_cmd->add_option("--out", out_path, "report JSON path");
  eval_table_cmd->add_option("--tau", tau, "key distance snap threshold");
  eval_table_cmd->add_option("--theta", theta, "value distance snap threshold");
  eval_table_cmd->add_flag("--rms", with_rms, "also compute mapping-similarity scores");
  eval_table_cmd->add_option("--split", split_name_flag, "dataset split to score");

  CLI::App* eval_qa_cmd = app.add_subcommand("eval-qa", "score question answering predictions");
  add_dataset(eval_qa_cmd);
  eval_qa_cmd->add_option("--pred", pred_path, "predictions JSON file")->required();
  eval_qa_cmd->add_option("--out", out_path, "report JSON path");
  eval_qa_cmd->add_option("--tol", tol, "relative numeric tolerance");
  eval_qa_cmd->add_flag("--bleu", with_bleu, "also compute corpus BLEU over the answers");
  eval_qa_cmd->add_option("--split", split_name_flag, "dataset split to score");

  CLI::App* ask_cmd = app.add_subcommand("ask", "answer dataset questions with the model");
  add_dataset(ask_cmd);
  ask_cmd->add_option("--out", out_path, "predictions JSON path (resumable)")->required();
  add_endpoint_flags(ask_cmd);
  ask_cmd->add_option("--tables", tables_dir, "directory of extracted linearized tables");
  ask_cmd->add_option("--workers", workers, "parallel requests (capped by max_in_flight)");
  ask_cmd->add_option("--split", split_name_flag, "dataset split to answer");

  CLI::App* rowcol_cmd =
      app.add_subcommand("extract-rowcol", "extract row/column hints for chart images");
  rowcol_cmd->add_option("--image", image_path, "single chart image");
  add_dataset(rowcol_cmd, /*required=*/false);
  rowcol_cmd->add_option("--out", out_path, "sidecar output directory");
  add_endpoint_flags(rowcol_cmd);
  rowcol_cmd->add_option("--split", split_name_flag, "dataset split to annotate");

  CLI::App* report_cmd = app.add_subcommand("report", "render a report JSON as text");
  report_cmd->add_option("--in", report_in, "report JSON path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (preprocess_cmd->parsed()) {
      DatasetIndex index = ingest_dataset(dataset_root);
      PreprocessSummary summary = run_preprocess(index, out_path, seed, workers);
      std::cout << "charts: " << summary.charts_ok << "/" << summary.charts_total
                << " ok, images: " << summary.images_written
                << ", sidecars: " << summary.sidecars_written << "\n";
      for (const auto& [id, error] : summary.failures) {
        std::cout << "failed " << id << ": " << error << "\n";
      }
      return summary.failures.empty() ? kExitOk : kExitPartial;
    }

    if (eval_table_cmd->parsed()) {
      DatasetIndex index = ingest_dataset(dataset_root);
      EvalParams params;
      params.tau = tau;
      params.theta = theta;
      params.with_rms = with_rms;
      params.split = parse_split(split_name_flag);
      MetricReport report = run_eval_table(pred_path, index, params);
      emit_report(report, out_path, "eval-table",
                  {{"dataset", dataset_root},
                   {"pred", pred_path},
                   {"tau", tau},
                   {"theta", theta},
                   {"rms", with_rms},
                   {"split", split_name_flag}});
      return count_item_errors(report) == 0 ? kExitOk : kExitPartial;
    }

    if (eval_qa_cmd->parsed()) {
      DatasetIndex index = ingest_dataset(dataset_root);
      EvalParams params;
      params.tol = tol;
      params.with_bleu = with_bleu;
      params.split = parse_split(split_name_flag);
      MetricReport report = run_eval_qa(index, load_predictions(pred_path), params);
      emit_report(report, out_path, "eval-qa",
                  {{"dataset", dataset_root},
                   {"pred", pred_path},
                   {"tol", tol},
                   {"bleu", with_bleu},
                   {"split", split_name_flag}});
      return count_item_errors(report) == 0 ? kExitOk : kExitPartial;
    }

    if (ask_cmd->parsed()) {
      DatasetIndex index = ingest_dataset(dataset_root);
      ServiceConfig cfg = service_config_from(config_file, endpoint, model);
      AskOptions options;
      if (!fixtures.empty()) options.fixtures = fixtures;
      if (!tables_dir.empty()) options.tables_dir = tables_dir;
      options.templates_dir = resolve_templates_dir(templates_flag);
      options.split = parse_split(split_name_flag);
      options.workers = workers;
      AskSummary summary = run_ask(index, cfg, out_path, options);
      std::cout << "answered: " << summary.answered << ", skipped: " << summary.skipped
                << ", failed: " << summary.failures.size() << "\n";
      for (const auto& [qid, error] : summary.failures) {
        std::cout << "failed " << qid << ": " << error << "\n";
      }
      return summary.failures.empty() ? kExitOk : kExitPartial;
    }

    if (rowcol_cmd->parsed()) {
      ServiceConfig cfg = service_config_from(config_file, endpoint, model);
      PromptTemplates templates = PromptTemplates::load(resolve_templates_dir(templates_flag));

      std::optional<std::map<std::string, std::string>> recorded;
      if (!fixtures.empty()) {
        std::ifstream in(fixtures);
        if (!in) raise(Errc::IoError, "cannot read fixtures " + fixtures);
        recorded = nlohmann::json::parse(in).get<std::map<std::string, std::string>>();
      }

      std::vector<std::pair<std::string, fs::path>> images;
      if (!image_path.empty()) {
        images.emplace_back(fs::path(image_path).stem().string(), image_path);
      } else if (!dataset_root.empty()) {
        DatasetIndex index = ingest_dataset(dataset_root);
        Split split = parse_split(split_name_flag);
        for (const ChartEntry& entry : index.entries) {
          if (entry.split == split) images.emplace_back(entry.chart_id, entry.image_path);
        }
      } else {
        throw CLI::ValidationError("extract-rowcol", "need --image or --dataset");
      }

      int failures = 0;
      for (const auto& [chart_id, path] : images) {
        try {
          std::string completion;
          if (recorded) {
            auto it = recorded->find(chart_id);
            if (it == recorded->end()) {
              raise(Errc::IoError, "no recorded completion for " + chart_id);
            }
            completion = it->second;
          } else {
            Image image = load_png(path);
            LmmResponse response = chat(build_rowcol_prompt(templates, image), cfg);
            completion = response.text;
          }
          RowColAnnotation ann = parse_rowcol_response(completion);
          fs::path sidecar = out_path.empty()
                                 ? fs::path(path.string() + ".rowcol.json")
                                 : fs::path(out_path) / (chart_id + ".rowcol.json");
          if (!out_path.empty()) fs::create_directories(out_path);
          write_annotation_sidecar(ann, sidecar);
          std::cout << chart_id << " -> " << sidecar.string() << "\n";
        } catch (const Error& e) {
          ++failures;
          std::cout << "failed " << chart_id << ": " << e.what() << "\n";
        }
      }
      return failures == 0 ? kExitOk : kExitPartial;
    }

    if (report_cmd->parsed()) {
      std::ifstream in(report_in);
      if (!in) raise(Errc::IoError, "cannot read report " + report_in);
      MetricReport report = report_from_json(nlohmann::json::parse(in));
      std::cout << render_report_text(report);
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitHardFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitHardFailure;
  }
  return kExitOk;
}
