#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlohmann/json_fwd.hpp"

#include "chartbench/metrics.hpp"

namespace chartbench {

inline constexpr int kReportSchemaVersion = 1;

// One scored chart or question.
struct PerItemScore {
  std::string id;
  std::string group;  // chart type for table runs, answer kind for QA runs
  std::optional<ScoreTriple> rd;
  std::optional<ScoreTriple> rms;
  std::optional<bool> correct;
  std::string error;  // empty when the item scored cleanly
};

struct GroupSummary {
  int count = 0;
  std::optional<ScoreTriple> rd;
  std::optional<ScoreTriple> rms;
  std::optional<double> ra;
};

// Aggregated evaluation results. Library values live in [0, 1]; the JSON and
// text renderings use the conventional 0-100 scale.
struct MetricReport {
  std::optional<ScoreTriple> rd;
  std::optional<ScoreTriple> rms;
  std::optional<double> ra;
  std::optional<double> bleu;
  std::vector<PerItemScore> per_item;
  std::map<std::string, GroupSummary> groups;
};

// Arithmetic means per group and overall, in the order the items arrive.
MetricReport aggregate_report(std::vector<PerItemScore> items);

nlohmann::json report_to_json(const MetricReport& report);
MetricReport report_from_json(const nlohmann::json& doc);

std::string render_report_text(const MetricReport& report);

}  // namespace chartbench
