#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "chartbench/chart.hpp"
#include "chartbench/error.hpp"
#include "font5x7.hpp"

namespace chartbench {
namespace {

using detail::draw_text;
using detail::text_width;

constexpr Rgb kWhite{255, 255, 255};
constexpr Rgb kBlack{20, 20, 20};
constexpr Rgb kAxis{90, 90, 90};
constexpr Rgb kGrid{224, 224, 224};

constexpr int kMinCanvasWidth = 160;
constexpr int kMinCanvasHeight = 120;

struct PlotArea {
  int left, top, right, bottom;
  int width() const { return right - left; }
  int height() const { return bottom - top; }
};

void fill_rect(Image& img, int x0, int y0, int x1, int y1, Rgb c) {
  if (x0 > x1) std::swap(x0, x1);
  if (y0 > y1) std::swap(y0, y1);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) img.set(x, y, c);
  }
}

void draw_hline(Image& img, int x0, int x1, int y, Rgb c) { fill_rect(img, x0, y, x1, y, c); }
void draw_vline(Image& img, int x, int y0, int y1, Rgb c) { fill_rect(img, x, y0, x, y1, c); }

void draw_line(Image& img, int x0, int y0, int x1, int y1, Rgb c) {
  int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    img.set(x0, y0, c);
    if (x0 == x1 && y0 == y1) break;
    int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string clip_text(std::string text, int max_width) {
  if (text_width(text) <= max_width) return text;
  while (!text.empty() && text_width(text + "...") > max_width) text.pop_back();
  return text + "...";
}

struct ValueScale {
  double vmin, vmax;
  int y_top, y_bottom;

  int to_pixel(double v) const {
    double t = (v - vmin) / (vmax - vmin);
    return y_bottom - static_cast<int>(std::lround(t * (y_bottom - y_top)));
  }
};

ValueScale make_scale(const ChartSpec& spec, int top, int bottom) {
  double vmin = 0.0, vmax = 0.0;
  bool any = false;
  for (const Series& s : spec.series) {
    for (const SeriesPoint& p : s.points) {
      vmin = any ? std::min(vmin, p.value) : std::min(0.0, p.value);
      vmax = any ? std::max(vmax, p.value) : std::max(0.0, p.value);
      any = true;
    }
  }
  if (!any || vmax - vmin < 1e-12) {
    // Degenerate range: pad by one unit either side.
    vmin -= 1.0;
    vmax += 1.0;
  }
  return ValueScale{vmin, vmax, top, bottom};
}

void draw_legend(Image& img, const ChartSpec& spec, int anchor_right, int top) {
  int y = top;
  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    const std::string& name = spec.series[s].name;
    int w = text_width(name) + 12;
    int x = anchor_right - w;
    fill_rect(img, x, y, x + 7, y + 7, spec.palette[s % spec.palette.size()]);
    draw_text(img, x + 10, y, name, kBlack);
    y += 11;
  }
}

std::vector<std::string> point_labels(const ChartSpec& spec) {
  std::vector<std::string> labels;
  if (spec.series.empty()) return labels;
  for (const SeriesPoint& p : spec.series[0].points) labels.push_back(p.label);
  return labels;
}

void draw_value_axis_ticks(Image& img, const ValueScale& scale, int axis_x, int plot_right) {
  for (int k = 0; k <= 4; ++k) {
    double v = scale.vmin + (scale.vmax - scale.vmin) * k / 4.0;
    int y = scale.to_pixel(v);
    draw_hline(img, axis_x + 1, plot_right, y, kGrid);
    std::string label = tick_label(v);
    draw_text(img, std::max(1, axis_x - 4 - text_width(label)), y - 3, label, kAxis);
  }
}

void render_vertical_bars(Image& img, const ChartSpec& spec, const PlotArea& plot) {
  ValueScale scale = make_scale(spec, plot.top, plot.bottom);
  draw_value_axis_ticks(img, scale, plot.left, plot.right);
  draw_vline(img, plot.left, plot.top, plot.bottom, kAxis);
  int baseline = scale.to_pixel(std::clamp(0.0, scale.vmin, scale.vmax));
  draw_hline(img, plot.left, plot.right, baseline, kAxis);

  const std::vector<std::string> labels = point_labels(spec);
  const int groups = static_cast<int>(labels.size());
  const int series_count = static_cast<int>(spec.series.size());
  if (groups == 0 || series_count == 0) return;
  const double group_w = static_cast<double>(plot.width()) / groups;
  const int bar_w = std::max(1, static_cast<int>((group_w - 4) / series_count) - 1);

  for (int g = 0; g < groups; ++g) {
    int gx = plot.left + static_cast<int>(g * group_w);
    for (int s = 0; s < series_count; ++s) {
      const SeriesPoint& p = spec.series[s].points[g];
      int x0 = gx + 2 + s * (bar_w + 1);
      int y1 = scale.to_pixel(p.value);
      Rgb color = spec.palette[s % spec.palette.size()];
      fill_rect(img, x0, std::min(baseline, y1), x0 + bar_w - 1, std::max(baseline, y1), color);
      std::string value_text = format_number(p.value);
      int tx = x0 + (bar_w - text_width(value_text)) / 2;
      int ty = p.value >= 0 ? y1 - 9 : y1 + 3;
      draw_text(img, std::max(plot.left + 1, tx), ty, value_text, kBlack);
    }
    std::string label = clip_text(labels[g], static_cast<int>(group_w) - 2);
    int lx = gx + (static_cast<int>(group_w) - text_width(label)) / 2;
    draw_text(img, std::max(plot.left + 1, lx), plot.bottom + 4, label, kBlack);
  }
}

void render_horizontal_bars(Image& img, const ChartSpec& spec, const PlotArea& plot) {
  // Value axis runs along x; categories stack down the y axis.
  double vmin = 0.0, vmax = 0.0;
  for (const Series& s : spec.series) {
    for (const SeriesPoint& p : s.points) {
      vmin = std::min(vmin, p.value);
      vmax = std::max(vmax, p.value);
    }
  }
  if (vmax - vmin < 1e-12) {
    vmin -= 1.0;
    vmax += 1.0;
  }
  auto to_x = [&](double v) {
    double t = (v - vmin) / (vmax - vmin);
    return plot.left + static_cast<int>(std::lround(t * plot.width()));
  };

  draw_vline(img, plot.left, plot.top, plot.bottom, kAxis);
  draw_hline(img, plot.left, plot.right, plot.bottom, kAxis);
  int baseline = to_x(std::clamp(0.0, vmin, vmax));

  const std::vector<std::string> labels = point_labels(spec);
  const int groups = static_cast<int>(labels.size());
  const int series_count = static_cast<int>(spec.series.size());
  if (groups == 0 || series_count == 0) return;
  const double group_h = static_cast<double>(plot.height()) / groups;
  const int bar_h = std::max(1, static_cast<int>((group_h - 4) / series_count) - 1);

  for (int g = 0; g < groups; ++g) {
    int gy = plot.top + static_cast<int>(g * group_h);
    for (int s = 0; s < series_count; ++s) {
      const SeriesPoint& p = spec.series[s].points[g];
      int y0 = gy + 2 + s * (bar_h + 1);
      int x1 = to_x(p.value);
      Rgb color = spec.palette[s % spec.palette.size()];
      fill_rect(img, std::min(baseline, x1), y0, std::max(baseline, x1), y0 + bar_h - 1, color);
      std::string value_text = format_number(p.value);
      int tx = p.value >= 0 ? x1 + 3 : x1 - 3 - text_width(value_text);
      draw_text(img, tx, y0 + (bar_h - 7) / 2, value_text, kBlack);
    }
    std::string label = clip_text(labels[g], plot.left - 4);
    draw_text(img, std::max(1, plot.left - 4 - text_width(label)),
              gy + (static_cast<int>(group_h) - 7) / 2, label, kAxis);
  }
}

void render_lines(Image& img, const ChartSpec& spec, const PlotArea& plot) {
  ValueScale scale = make_scale(spec, plot.top, plot.bottom);
  draw_value_axis_ticks(img, scale, plot.left, plot.right);
  draw_vline(img, plot.left, plot.top, plot.bottom, kAxis);
  draw_hline(img, plot.left, plot.right, plot.bottom, kAxis);

  const std::vector<std::string> labels = point_labels(spec);
  const int count = static_cast<int>(labels.size());
  if (count == 0) return;
  auto x_at = [&](int i) {
    if (count == 1) return plot.left + plot.width() / 2;
    return plot.left + 4 + static_cast<int>(std::lround(
                               static_cast<double>(plot.width() - 8) * i / (count - 1)));
  };

  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    Rgb color = spec.palette[s % spec.palette.size()];
    const std::vector<SeriesPoint>& pts = spec.series[s].points;
    for (int i = 0; i < count; ++i) {
      int x = x_at(i), y = scale.to_pixel(pts[i].value);
      if (i > 0) {
        draw_line(img, x_at(i - 1), scale.to_pixel(pts[i - 1].value), x, y, color);
      }
      fill_rect(img, x - 1, y - 1, x + 1, y + 1, color);
      std::string value_text = format_number(pts[i].value);
      draw_text(img, x - text_width(value_text) / 2, y - 10, value_text, kBlack);
    }
  }
  for (int i = 0; i < count; ++i) {
    std::string label = clip_text(labels[i], 60);
    draw_text(img, x_at(i) - text_width(label) / 2, plot.bottom + 4, label, kBlack);
  }
}

void render_pie(Image& img, const ChartSpec& spec, const PlotArea& plot) {
  const std::vector<SeriesPoint>& pts = spec.series[0].points;
  double total = 0.0;
  for (const SeriesPoint& p : pts) total += p.value;

  // Slices on the left, one labelled swatch per point on the right.
  int cx = plot.left + plot.width() / 3;
  int cy = plot.top + plot.height() / 2;
  int radius = std::max(10, std::min(plot.width() / 3, plot.height() / 2) - 4);

  std::vector<double> cumulative{0.0};
  for (const SeriesPoint& p : pts) cumulative.push_back(cumulative.back() + p.value / total);

  const double two_pi = 2.0 * 3.14159265358979323846;
  for (int y = cy - radius; y <= cy + radius; ++y) {
    for (int x = cx - radius; x <= cx + radius; ++x) {
      double dx = x - cx, dy = y - cy;
      if (dx * dx + dy * dy > static_cast<double>(radius) * radius) continue;
      // Clockwise fraction of the circle, starting at twelve o'clock.
      double angle = std::atan2(dx, -dy);
      if (angle < 0) angle += two_pi;
      double frac = angle / two_pi;
      std::size_t slice = pts.size() - 1;
      for (std::size_t k = 0; k + 1 < cumulative.size(); ++k) {
        if (frac >= cumulative[k] && frac < cumulative[k + 1]) {
          slice = k;
          break;
        }
      }
      img.set(x, y, spec.palette[slice % spec.palette.size()]);
    }
  }

  int ly = plot.top + 4;
  int lx = cx + radius + 10;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    fill_rect(img, lx, ly, lx + 7, ly + 7, spec.palette[k % spec.palette.size()]);
    std::string text = clip_text(pts[k].label, img.width - lx - 60);
    text += " " + format_number(pts[k].value);
    draw_text(img, lx + 10, ly, text, kBlack);
    ly += 11;
  }
}

}  // namespace

Image render_chart(const ChartSpec& spec) {
  if (spec.width < kMinCanvasWidth || spec.height < kMinCanvasHeight) {
    raise(Errc::CanvasTooSmall, "canvas " + std::to_string(spec.width) + "x" +
                                    std::to_string(spec.height) + " below minimum " +
                                    std::to_string(kMinCanvasWidth) + "x" +
                                    std::to_string(kMinCanvasHeight));
  }
  if (spec.series.empty()) raise(Errc::NonNumericCell, "chart spec has no series");
  if (spec.palette.empty()) raise(Errc::CanvasTooSmall, "chart spec has an empty palette");

  Image img = Image::blank(spec.width, spec.height, kWhite);
  img.provenance = "simple";

  int top = 4;
  if (spec.title) {
    std::string title = clip_text(*spec.title, spec.width - 8);
    draw_text(img, (spec.width - text_width(title)) / 2, top, title, kBlack);
    top += 12;
  }
  draw_legend(img, spec, spec.width - 6, top);
  top += 2;

  PlotArea plot{46, top + 10, spec.width - 10, spec.height - 26};
  switch (spec.type) {
    case ChartType::bar:
      if (spec.orientation == Orientation::horizontal) {
        render_horizontal_bars(img, spec, plot);
      } else {
        render_vertical_bars(img, spec, plot);
      }
      break;
    case ChartType::line:
      render_lines(img, spec, plot);
      break;
    case ChartType::pie:
      render_pie(img, spec, plot);
      break;
  }
  return img;
}

}  // namespace chartbench
