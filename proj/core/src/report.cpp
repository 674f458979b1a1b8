#include "chartbench/report.hpp"

#include <cstdio>
#include <sstream>

#include "nlohmann/json.hpp"

#include "chartbench/error.hpp"

namespace chartbench {
namespace {

struct TripleSum {
  double precision = 0, recall = 0, f1 = 0;
  int count = 0;

  void add(const ScoreTriple& t) {
    precision += t.precision;
    recall += t.recall;
    f1 += t.f1;
    ++count;
  }
  std::optional<ScoreTriple> mean() const {
    if (count == 0) return std::nullopt;
    return ScoreTriple{precision / count, recall / count, f1 / count};
  }
};

nlohmann::json triple_to_json(const ScoreTriple& t) {
  return {{"precision", t.precision * 100.0},
          {"recall", t.recall * 100.0},
          {"f1", t.f1 * 100.0}};
}

ScoreTriple triple_from_json(const nlohmann::json& doc) {
  return ScoreTriple{doc.at("precision").get<double>() / 100.0,
                     doc.at("recall").get<double>() / 100.0,
                     doc.at("f1").get<double>() / 100.0};
}

std::string pct(double unit_value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", unit_value * 100.0);
  return buf;
}

}  // namespace

MetricReport aggregate_report(std::vector<PerItemScore> items) {
  MetricReport report;
  TripleSum rd_all, rms_all;
  int correct_all = 0, answered_all = 0;
  struct GroupAcc {
    TripleSum rd, rms;
    int correct = 0, answered = 0, count = 0;
  };
  std::map<std::string, GroupAcc> groups;

  for (const PerItemScore& item : items) {
    GroupAcc& g = groups[item.group];
    ++g.count;
    if (item.rd) {
      rd_all.add(*item.rd);
      g.rd.add(*item.rd);
    }
    if (item.rms) {
      rms_all.add(*item.rms);
      g.rms.add(*item.rms);
    }
    if (item.correct) {
      ++answered_all;
      ++g.answered;
      if (*item.correct) {
        ++correct_all;
        ++g.correct;
      }
    }
  }

  report.rd = rd_all.mean();
  report.rms = rms_all.mean();
  if (answered_all > 0) report.ra = static_cast<double>(correct_all) / answered_all;
  for (const auto& [name, acc] : groups) {
    GroupSummary summary;
    summary.count = acc.count;
    summary.rd = acc.rd.mean();
    summary.rms = acc.rms.mean();
    if (acc.answered > 0) summary.ra = static_cast<double>(acc.correct) / acc.answered;
    report.groups.emplace(name, std::move(summary));
  }
  report.per_item = std::move(items);
  return report;
}

nlohmann::json report_to_json(const MetricReport& report) {
  nlohmann::json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["scale"] = "percent";
  if (report.rd) doc["rd"] = triple_to_json(*report.rd);
  if (report.rms) doc["rms"] = triple_to_json(*report.rms);
  if (report.ra) doc["ra"] = *report.ra * 100.0;
  if (report.bleu) doc["bleu"] = *report.bleu * 100.0;

  nlohmann::json groups = nlohmann::json::object();
  for (const auto& [name, summary] : report.groups) {
    nlohmann::json g;
    g["count"] = summary.count;
    if (summary.rd) g["rd"] = triple_to_json(*summary.rd);
    if (summary.rms) g["rms"] = triple_to_json(*summary.rms);
    if (summary.ra) g["ra"] = *summary.ra * 100.0;
    groups[name] = std::move(g);
  }
  doc["groups"] = std::move(groups);

  nlohmann::json items = nlohmann::json::array();
  for (const PerItemScore& item : report.per_item) {
    nlohmann::json entry;
    entry["id"] = item.id;
    entry["group"] = item.group;
    if (item.rd) entry["rd"] = triple_to_json(*item.rd);
    if (item.rms) entry["rms"] = triple_to_json(*item.rms);
    if (item.correct) entry["correct"] = *item.correct;
    if (!item.error.empty()) entry["error"] = item.error;
    items.push_back(std::move(entry));
  }
  doc["per_item"] = std::move(items);
  return doc;
}

MetricReport report_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("schema_version", 0) != kReportSchemaVersion) {
    raise(Errc::MalformedJson, "unsupported report document");
  }
  MetricReport report;
  if (doc.contains("rd")) report.rd = triple_from_json(doc.at("rd"));
  if (doc.contains("rms")) report.rms = triple_from_json(doc.at("rms"));
  if (doc.contains("ra")) report.ra = doc.at("ra").get<double>() / 100.0;
  if (doc.contains("bleu")) report.bleu = doc.at("bleu").get<double>() / 100.0;
  for (const auto& [name, g] : doc.at("groups").items()) {
    GroupSummary summary;
    summary.count = g.at("count").get<int>();
    if (g.contains("rd")) summary.rd = triple_from_json(g.at("rd"));
    if (g.contains("rms")) summary.rms = triple_from_json(g.at("rms"));
    if (g.contains("ra")) summary.ra = g.at("ra").get<double>() / 100.0;
    report.groups.emplace(name, std::move(summary));
  }
  for (const nlohmann::json& entry : doc.at("per_item")) {
    PerItemScore item;
    item.id = entry.at("id").get<std::string>();
    item.group = entry.at("group").get<std::string>();
    if (entry.contains("rd")) item.rd = triple_from_json(entry.at("rd"));
    if (entry.contains("rms")) item.rms = triple_from_json(entry.at("rms"));
    if (entry.contains("correct")) item.correct = entry.at("correct").get<bool>();
    item.error = entry.value("error", "");
    report.per_item.push_back(std::move(item));
  }
  return report;
}

std::string render_report_text(const MetricReport& report) {
  std::ostringstream out;
  auto line = [&](const std::string& name, int count, const std::optional<ScoreTriple>& rd,
                  const std::optional<ScoreTriple>& rms, const std::optional<double>& ra) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-14s %6d %10s %10s %10s %10s %10s\n", name.c_str(), count,
                  rd ? pct(rd->f1).c_str() : "-", rd ? pct(rd->precision).c_str() : "-",
                  rd ? pct(rd->recall).c_str() : "-", rms ? pct(rms->f1).c_str() : "-",
                  ra ? pct(*ra).c_str() : "-");
    out << buf;
  };

  out << "group           count      rd_f1    rd_prec     rd_rec     rms_f1         ra\n";
  out << "-----------------------------------------------------------------------------\n";
  for (const auto& [name, g] : report.groups) {
    line(name, g.count, g.rd, g.rms, g.ra);
  }
  line("overall", static_cast<int>(report.per_item.size()), report.rd, report.rms, report.ra);
  if (report.bleu) {
    out << "bleu: " << pct(*report.bleu) << "\n";
  }
  return out.str();
}

}  // namespace chartbench
