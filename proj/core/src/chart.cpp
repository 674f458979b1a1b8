#include "chartbench/chart.hpp"

#include <array>

#include "nlohmann/json.hpp"

#include "chartbench/error.hpp"

namespace chartbench {
namespace {

// Fixed 12-color cycle; style seeds rotate the starting color.
constexpr std::array<Rgb, 12> kPalette{{
    {31, 119, 180},
    {255, 127, 14},
    {44, 160, 44},
    {214, 39, 40},
    {148, 103, 189},
    {140, 86, 75},
    {227, 119, 194},
    {127, 127, 127},
    {188, 189, 34},
    {23, 190, 207},
    {174, 199, 232},
    {255, 187, 120},
}};

constexpr int kSpecSchemaVersion = 1;

}  // namespace

const char* chart_type_name(ChartType type) {
  switch (type) {
    case ChartType::pie: return "pie";
    case ChartType::bar: return "bar";
    case ChartType::line: return "line";
  }
  return "bar";
}

std::optional<ChartType> chart_type_from_name(std::string_view name) {
  if (name == "pie") return ChartType::pie;
  if (name == "bar") return ChartType::bar;
  if (name == "line") return ChartType::line;
  return std::nullopt;
}

ChartSpec build_chart_spec(const Table& table, ChartType type, std::uint64_t style_seed) {
  if (table.rows.empty() || table.col_headers.empty()) {
    raise(Errc::NonNumericCell, "table has no plottable cells");
  }
  if (type == ChartType::pie && table.col_count() != 1) {
    raise(Errc::PieShapeError,
          "pie charts need exactly one column, got " + std::to_string(table.col_count()));
  }

  ChartSpec spec;
  spec.type = type;
  spec.title = table.title;

  for (std::size_t j = 0; j < table.col_count(); ++j) {
    Series series;
    series.name = table.col_headers[j];
    for (const TableRow& row : table.rows) {
      const Cell& cell = row.cells[j];
      if (!cell.is_numeric()) {
        raise(Errc::NonNumericCell,
              "cell (" + row.label + ", " + table.col_headers[j] + ") = \"" + cell.raw +
                  "\" is not numeric");
      }
      series.points.push_back(SeriesPoint{row.label, *cell.numeric});
    }
    spec.series.push_back(std::move(series));
  }

  if (type == ChartType::pie) {
    double total = 0.0;
    for (const SeriesPoint& p : spec.series[0].points) {
      if (p.value < 0.0) {
        raise(Errc::PieShapeError, "negative slice value for \"" + p.label + "\"");
      }
      total += p.value;
    }
    if (total <= 0.0) raise(Errc::PieShapeError, "pie values sum to zero");
  }

  spec.palette.reserve(kPalette.size());
  std::size_t offset = static_cast<std::size_t>(style_seed % kPalette.size());
  for (std::size_t i = 0; i < kPalette.size(); ++i) {
    spec.palette.push_back(kPalette[(offset + i) % kPalette.size()]);
  }
  return spec;
}

nlohmann::json chart_spec_to_json(const ChartSpec& spec) {
  nlohmann::json doc;
  doc["schema_version"] = kSpecSchemaVersion;
  doc["type"] = chart_type_name(spec.type);
  if (spec.title) doc["title"] = *spec.title;
  doc["orientation"] = spec.orientation == Orientation::vertical ? "vertical" : "horizontal";
  doc["width"] = spec.width;
  doc["height"] = spec.height;
  nlohmann::json palette = nlohmann::json::array();
  for (const Rgb& c : spec.palette) palette.push_back({c.r, c.g, c.b});
  doc["palette"] = std::move(palette);
  nlohmann::json series = nlohmann::json::array();
  for (const Series& s : spec.series) {
    nlohmann::json points = nlohmann::json::array();
    for (const SeriesPoint& p : s.points) {
      points.push_back({{"label", p.label}, {"value", p.value}});
    }
    series.push_back({{"name", s.name}, {"points", std::move(points)}});
  }
  doc["series"] = std::move(series);
  return doc;
}

ChartSpec chart_spec_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("schema_version", 0) != kSpecSchemaVersion) {
    raise(Errc::MalformedJson, "unsupported chart spec document");
  }
  ChartSpec spec;
  auto type = chart_type_from_name(doc.at("type").get<std::string>());
  if (!type) raise(Errc::MalformedJson, "unknown chart type");
  spec.type = *type;
  if (doc.contains("title")) spec.title = doc.at("title").get<std::string>();
  spec.orientation = doc.value("orientation", "vertical") == "horizontal"
                         ? Orientation::horizontal
                         : Orientation::vertical;
  spec.width = doc.value("width", 640);
  spec.height = doc.value("height", 480);
  for (const nlohmann::json& c : doc.at("palette")) {
    spec.palette.push_back(Rgb{c.at(0).get<std::uint8_t>(), c.at(1).get<std::uint8_t>(),
                               c.at(2).get<std::uint8_t>()});
  }
  for (const nlohmann::json& s : doc.at("series")) {
    Series series;
    series.name = s.at("name").get<std::string>();
    for (const nlohmann::json& p : s.at("points")) {
      series.points.push_back(
          SeriesPoint{p.at("label").get<std::string>(), p.at("value").get<double>()});
    }
    spec.series.push_back(std::move(series));
  }
  return spec;
}

}  // namespace chartbench
