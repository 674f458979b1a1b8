#include "chartbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "nlohmann/json.hpp"

#include "chartbench/error.hpp"
#include "chartbench/preprocess.hpp"

namespace chartbench {
namespace {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (char c : text) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ULL;
  }
  return hash;
}

// Stable per-chart seed: independent of batch order and worker count.
std::uint64_t chart_seed(std::uint64_t run_seed, const std::string& chart_id) {
  return run_seed ^ fnv1a64(chart_id);
}

ChartType chart_type_or_bar(const std::string& name) {
  return chart_type_from_name(name).value_or(ChartType::bar);
}

void run_parallel(std::size_t item_count, int workers, const std::function<void(std::size_t)>& fn) {
  const int thread_count =
      std::max(1, std::min<int>(workers, static_cast<int>(item_count)));
  if (thread_count == 1) {
    for (std::size_t i = 0; i < item_count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(thread_count);
  for (int t = 0; t < thread_count; ++t) {
    pool.emplace_back([&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= item_count) return;
        fn(i);
      }
    });
  }
  for (std::thread& t : pool) t.join();
}

nlohmann::json predictions_to_json(const std::map<std::string, std::string>& predictions,
                                   const std::map<std::string, std::string>& errors) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["predictions"] = predictions;
  doc["errors"] = errors;
  return doc;
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::IoError, "cannot write " + tmp.string());
    out << content;
    if (!out.good()) raise(Errc::IoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) raise(Errc::IoError, "rename " + tmp.string() + " -> " + path.string() + ": " +
                                   ec.message());
}

void write_manifest(const std::filesystem::path& path, const std::string& command,
                    const nlohmann::json& params) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["command"] = command;
  doc["params"] = params;
  doc["metric_defaults"] = {{"tau", kDefaultTau}, {"theta", kDefaultTheta},
                            {"tol", kDefaultTolerance}};
  write_file_atomic(path, doc.dump(2) + "\n");
}

MetricReport run_eval_table(const std::filesystem::path& pred_dir, const DatasetIndex& gold,
                            const EvalParams& params) {
  std::vector<PerItemScore> items;
  for (const ChartEntry& entry : gold.entries) {
    if (entry.split != params.split || entry.table_path.empty()) continue;

    PerItemScore item;
    item.id = entry.chart_id;
    item.group = entry.chart_type;
    try {
      Table truth = from_csv(read_text_file(entry.table_path));
      std::filesystem::path pred_path = pred_dir / (entry.chart_id + ".txt");
      if (!std::filesystem::exists(pred_path)) {
        item.rd = ScoreTriple{0.0, 0.0, 0.0};
        if (params.with_rms) item.rms = ScoreTriple{0.0, 0.0, 0.0};
        item.error = "missing_prediction";
      } else {
        Table predicted = parse_linearized(read_text_file(pred_path));
        item.rd = rd_scores(predicted, truth, params.theta, params.tau);
        if (params.with_rms) item.rms = rms_scores(predicted, truth, params.tau, params.theta);
      }
    } catch (const Error& e) {
      item.rd = ScoreTriple{0.0, 0.0, 0.0};
      if (params.with_rms) item.rms = ScoreTriple{0.0, 0.0, 0.0};
      item.error = errc_name(e.code());
    }
    items.push_back(std::move(item));
  }
  return aggregate_report(std::move(items));
}

MetricReport run_eval_qa(const DatasetIndex& index,
                         const std::map<std::string, std::string>& predictions,
                         const EvalParams& params) {
  std::vector<PerItemScore> items;
  std::vector<std::string> candidates, references;
  for (const QARecord& qa : index.qa) {
    if (qa.split != params.split) continue;

    PerItemScore item;
    item.id = qa.qid;
    item.group = qa.kind;
    std::string predicted;
    auto it = predictions.find(qa.qid);
    if (it != predictions.end()) {
      predicted = it->second;
    } else if (qa.predicted) {
      predicted = *qa.predicted;
    } else {
      item.error = "missing_prediction";
    }
    item.correct = item.error.empty() && relaxed_accuracy(predicted, qa.gold, params.tol);
    candidates.push_back(predicted);
    references.push_back(qa.gold);
    items.push_back(std::move(item));
  }
  MetricReport report = aggregate_report(std::move(items));
  if (params.with_bleu && !candidates.empty()) {
    report.bleu = corpus_bleu(candidates, references);
  }
  return report;
}

PreprocessSummary run_preprocess(const DatasetIndex& index, const std::filesystem::path& out_dir,
                                 std::uint64_t seed, int workers) {
  std::filesystem::create_directories(out_dir);

  std::vector<const ChartEntry*> work;
  for (const ChartEntry& entry : index.entries) {
    if (entry.split == Split::test) continue;
    work.push_back(&entry);
  }

  PreprocessSummary summary;
  summary.charts_total = static_cast<int>(work.size());
  std::mutex mutex;

  run_parallel(work.size(), workers, [&](std::size_t i) {
    const ChartEntry& entry = *work[i];
    try {
      if (entry.table_path.empty()) {
        raise(Errc::IoError, "no gold table for chart " + entry.chart_id);
      }
      Table table = from_csv(read_text_file(entry.table_path));
      Image original = load_png(entry.image_path);
      TrainingTriple triple = make_training_triple(
          original, table, chart_type_or_bar(entry.chart_type), chart_seed(seed, entry.chart_id));

      auto save_atomic = [&](const Image& img, const std::string& suffix) {
        std::filesystem::path path = out_dir / (entry.chart_id + suffix);
        std::vector<std::uint8_t> bytes = encode_png(img);
        write_file_atomic(path, std::string(bytes.begin(), bytes.end()));
      };
      save_atomic(triple.anchor, ".anchor.png");
      save_atomic(triple.positive, ".positive.png");
      save_atomic(triple.negative, ".negative.png");
      write_annotation_sidecar(annotation_from_table(table),
                               out_dir / (entry.chart_id + ".rowcol.json"));

      std::lock_guard lock(mutex);
      ++summary.charts_ok;
      summary.images_written += 3;
      ++summary.sidecars_written;
    } catch (const Error& e) {
      std::lock_guard lock(mutex);
      summary.failures.emplace_back(entry.chart_id, errc_name(e.code()));
    }
  });

  std::sort(summary.failures.begin(), summary.failures.end());

  nlohmann::json params;
  params["seed"] = seed;
  params["charts_total"] = summary.charts_total;
  params["charts_ok"] = summary.charts_ok;
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& [id, error] : summary.failures) {
    failures.push_back({{"chart_id", id}, {"error", error}});
  }
  params["failures"] = std::move(failures);
  write_manifest(out_dir / "preprocess.manifest.json", "preprocess", params);
  return summary;
}

std::map<std::string, std::string> load_predictions(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::MalformedJson, path.string() + ": " + e.what());
  }
  if (doc.is_object() && doc.contains("predictions")) {
    return doc.at("predictions").get<std::map<std::string, std::string>>();
  }
  if (doc.is_object()) {
    // Bare {qid: answer} maps are accepted too.
    return doc.get<std::map<std::string, std::string>>();
  }
  raise(Errc::MalformedJson, path.string() + ": expected a predictions object");
}

AskSummary run_ask(const DatasetIndex& index, const ServiceConfig& config,
                   const std::filesystem::path& out_path, const AskOptions& options) {
  AskSummary summary;

  std::map<std::string, std::string> predictions;
  std::map<std::string, std::string> errors;
  if (std::filesystem::exists(out_path)) {
    predictions = load_predictions(out_path);
  }

  std::optional<std::map<std::string, std::string>> fixtures;
  if (options.fixtures) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_text_file(*options.fixtures));
    } catch (const nlohmann::json::exception& e) {
      raise(Errc::MalformedJson, options.fixtures->string() + ": " + e.what());
    }
    fixtures = doc.get<std::map<std::string, std::string>>();
  }

  std::optional<PromptTemplates> templates;
  if (!fixtures) templates = PromptTemplates::load(options.templates_dir);

  std::vector<const QARecord*> work;
  for (const QARecord& qa : index.qa) {
    if (qa.split != options.split) continue;
    if (predictions.count(qa.qid)) {
      ++summary.skipped;
      continue;
    }
    work.push_back(&qa);
  }

  std::mutex mutex;
  const int workers =
      fixtures ? 1 : std::max(1, std::min(options.workers, config.max_in_flight));

  run_parallel(work.size(), workers, [&](std::size_t i) {
    const QARecord& qa = *work[i];
    try {
      std::string answer;
      if (fixtures) {
        auto it = fixtures->find(qa.qid);
        if (it == fixtures->end()) {
          raise(Errc::IoError, "no recorded completion for " + qa.qid);
        }
        answer = extract_answer(it->second);
      } else {
        const ChartEntry* entry = index.find(qa.chart_id);
        if (!entry) raise(Errc::IoError, "no chart entry for " + qa.chart_id);
        Image image = load_png(entry->image_path);
        Table table;
        if (options.tables_dir) {
          std::filesystem::path table_path = *options.tables_dir / (qa.chart_id + ".txt");
          table = parse_linearized(read_text_file(table_path));
        } else if (!entry->table_path.empty()) {
          table = from_csv(read_text_file(entry->table_path));
        }
        answer = answer_question(image, table, qa.question,
                                 chart_type_or_bar(entry->chart_type), *templates, config);
      }
      std::lock_guard lock(mutex);
      predictions[qa.qid] = answer;
      ++summary.answered;
    } catch (const Error& e) {
      std::lock_guard lock(mutex);
      errors[qa.qid] = errc_name(e.code());
      summary.failures.emplace_back(qa.qid, errc_name(e.code()));
    }
  });

  std::sort(summary.failures.begin(), summary.failures.end());
  write_file_atomic(out_path, predictions_to_json(predictions, errors).dump(2) + "\n");

  nlohmann::json params;
  params["endpoint"] = config.base_url;
  params["model"] = config.model;
  params["temperature"] = kDefaultTemperature;
  params["max_tokens"] = kDefaultMaxTokens;
  params["split"] = split_name(options.split);
  params["fixtures"] = options.fixtures ? options.fixtures->string() : "";
  params["template_version"] = templates ? templates->version : "";
  params["workers"] = workers;
  write_manifest(out_path.string() + ".manifest.json", "ask", params);
  return summary;
}

}  // namespace chartbench
