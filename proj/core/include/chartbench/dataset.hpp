#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlohmann/json_fwd.hpp"

namespace chartbench {

enum class Split { train, val, test };

const char* split_name(Split split);
std::optional<Split> split_from_name(std::string_view name);

struct ChartEntry {
  std::string chart_id;
  std::filesystem::path image_path;
  std::filesystem::path table_path;  // empty when no gold table exists
  std::string chart_type = "unknown";
  Split split = Split::train;
};

struct QARecord {
  std::string chart_id;
  std::string qid;  // "<chart_id>#<kind>#<ordinal>", stable across runs
  std::string question;
  std::string gold;
  std::optional<std::string> predicted;
  std::string kind;  // human | augmented
  std::vector<std::string> tags;
  Split split = Split::test;
};

struct DatasetIndex {
  std::vector<ChartEntry> entries;  // sorted by chart_id
  std::vector<QARecord> qa;         // sorted by chart_id, file order within
  int warnings = 0;

  const ChartEntry* find(const std::string& chart_id) const;
  nlohmann::json to_json() const;
};

// Walks a ChartQA-style tree: <split>/png/*.png, <split>/tables/*.csv,
// <split>/<split>_human.json and <split>/<split>_augmented.json, with an
// optional chart_types.csv override at the root. QA entries pointing at
// missing charts are skipped with a warning count; tables are optional
// (test splits commonly lack them).
DatasetIndex ingest_dataset(const std::filesystem::path& root);

}  // namespace chartbench
