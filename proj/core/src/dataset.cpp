#include "chartbench/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "nlohmann/json.hpp"

#include "chartbench/error.hpp"

namespace chartbench {
namespace {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::map<std::string, std::string> load_type_overrides(const std::filesystem::path& root) {
  std::map<std::string, std::string> types;
  std::filesystem::path file = root / "chart_types.csv";
  if (!std::filesystem::exists(file)) return types;
  std::istringstream lines(read_text_file(file));
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t comma = line.find(',');
    if (comma == std::string::npos) continue;
    std::string id = line.substr(0, comma);
    std::string type = line.substr(comma + 1);
    if (type == "pie" || type == "bar" || type == "line") types[id] = type;
  }
  return types;
}

void load_qa_file(const std::filesystem::path& path, Split split, const std::string& kind,
                  const std::set<std::string>& known_ids, DatasetIndex& index,
                  std::map<std::string, int>& ordinals) {
  if (!std::filesystem::exists(path)) return;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::MalformedJson, path.string() + ": " + e.what());
  }
  if (!doc.is_array()) raise(Errc::MalformedJson, path.string() + ": expected an array");

  for (const nlohmann::json& item : doc) {
    QARecord record;
    std::string imgname = item.value("imgname", "");
    record.chart_id = std::filesystem::path(imgname).stem().string();
    record.question = item.value("query", "");
    record.gold = item.value("label", "");
    record.kind = kind;
    record.split = split;
    if (item.contains("tags")) record.tags = item.at("tags").get<std::vector<std::string>>();
    if (record.chart_id.empty() || known_ids.count(record.chart_id) == 0) {
      ++index.warnings;  // orphan question: warn and skip
      continue;
    }
    int ordinal = ordinals[record.chart_id + "#" + kind]++;
    record.qid = record.chart_id + "#" + kind + "#" + std::to_string(ordinal);
    index.qa.push_back(std::move(record));
  }
}

}  // namespace

const char* split_name(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "test";
}

std::optional<Split> split_from_name(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "val") return Split::val;
  if (name == "test") return Split::test;
  return std::nullopt;
}

const ChartEntry* DatasetIndex::find(const std::string& chart_id) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), chart_id,
                             [](const ChartEntry& e, const std::string& id) {
                               return e.chart_id < id;
                             });
  if (it != entries.end() && it->chart_id == chart_id) return &*it;
  return nullptr;
}

nlohmann::json DatasetIndex::to_json() const {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["warnings"] = warnings;
  nlohmann::json entry_list = nlohmann::json::array();
  for (const ChartEntry& e : entries) {
    entry_list.push_back({{"chart_id", e.chart_id},
                          {"image", e.image_path.string()},
                          {"table", e.table_path.string()},
                          {"chart_type", e.chart_type},
                          {"split", split_name(e.split)}});
  }
  doc["entries"] = std::move(entry_list);
  nlohmann::json qa_list = nlohmann::json::array();
  for (const QARecord& q : qa) {
    nlohmann::json item = {{"qid", q.qid},         {"chart_id", q.chart_id},
                           {"question", q.question}, {"gold", q.gold},
                           {"kind", q.kind},        {"split", split_name(q.split)}};
    if (!q.tags.empty()) item["tags"] = q.tags;
    if (q.predicted) item["predicted"] = *q.predicted;
    qa_list.push_back(std::move(item));
  }
  doc["qa"] = std::move(qa_list);
  return doc;
}

DatasetIndex ingest_dataset(const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root)) {
    raise(Errc::MissingDirectory, root.string() + " is not a directory");
  }

  DatasetIndex index;
  std::map<std::string, std::string> type_overrides = load_type_overrides(root);
  bool any_split = false;

  for (Split split : {Split::train, Split::val, Split::test}) {
    std::filesystem::path split_dir = root / split_name(split);
    if (!std::filesystem::is_directory(split_dir)) continue;
    any_split = true;

    std::filesystem::path png_dir = split_dir / "png";
    if (!std::filesystem::is_directory(png_dir)) {
      raise(Errc::MissingDirectory, png_dir.string() + " is missing");
    }
    std::set<std::string> ids;
    for (const auto& file : std::filesystem::directory_iterator(png_dir)) {
      if (!file.is_regular_file() || file.path().extension() != ".png") continue;
      std::string id = file.path().stem().string();
      if (!ids.insert(id).second) continue;

      ChartEntry entry;
      entry.chart_id = id;
      entry.image_path = file.path();
      entry.split = split;
      std::filesystem::path table = split_dir / "tables" / (id + ".csv");
      if (std::filesystem::exists(table)) {
        entry.table_path = table;
      } else if (split != Split::test) {
        ++index.warnings;  // train/val charts are expected to carry tables
      }
      auto type = type_overrides.find(id);
      if (type != type_overrides.end()) entry.chart_type = type->second;
      index.entries.push_back(std::move(entry));
    }

    std::set<std::string> known;
    for (const ChartEntry& e : index.entries) {
      if (e.split == split) known.insert(e.chart_id);
    }
    std::map<std::string, int> ordinals;
    std::string prefix = split_name(split);
    load_qa_file(split_dir / (prefix + "_human.json"), split, "human", known, index, ordinals);
    load_qa_file(split_dir / (prefix + "_augmented.json"), split, "augmented", known, index,
                 ordinals);
  }

  if (!any_split) {
    raise(Errc::MissingDirectory, root.string() + " holds no train/val/test split");
  }

  std::sort(index.entries.begin(), index.entries.end(),
            [](const ChartEntry& a, const ChartEntry& b) { return a.chart_id < b.chart_id; });
  std::stable_sort(index.qa.begin(), index.qa.end(),
                   [](const QARecord& a, const QARecord& b) { return a.chart_id < b.chart_id; });
  return index;
}

}  // namespace chartbench
