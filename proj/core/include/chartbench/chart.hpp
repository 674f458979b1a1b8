#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlohmann/json_fwd.hpp"

#include "chartbench/image.hpp"
#include "chartbench/table.hpp"

namespace chartbench {

enum class ChartType { pie, bar, line };

const char* chart_type_name(ChartType type);
std::optional<ChartType> chart_type_from_name(std::string_view name);

enum class Orientation { vertical, horizontal };

struct SeriesPoint {
  std::string label;
  double value = 0.0;

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

struct Series {
  std::string name;
  std::vector<SeriesPoint> points;

  friend bool operator==(const Series&, const Series&) = default;
};

// Declarative description of a renderable chart. Pie charts carry exactly one
// series with non-negative values (at least one positive); all series share
// one label sequence.
struct ChartSpec {
  ChartType type = ChartType::bar;
  std::optional<std::string> title;
  std::vector<Series> series;
  Orientation orientation = Orientation::vertical;  // bar charts only
  std::vector<Rgb> palette;
  int width = 640;
  int height = 480;

  friend bool operator==(const ChartSpec&, const ChartSpec&) = default;
};

// Deterministic spec from a table: one series per column, point labels from
// row labels, palette from a fixed 12-color cycle rotated by style_seed.
// Nothing beyond the table's own text ever enters the spec.
ChartSpec build_chart_spec(const Table& table, ChartType type, std::uint64_t style_seed);

// Versioned JSON snapshot form.
nlohmann::json chart_spec_to_json(const ChartSpec& spec);
ChartSpec chart_spec_from_json(const nlohmann::json& doc);

// Software rasterization: axes (bar/line), a legend naming every series, and
// a data label for every point. Deterministic for a fixed spec.
Image render_chart(const ChartSpec& spec);

}  // namespace chartbench
