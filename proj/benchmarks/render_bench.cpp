#include <benchmark/benchmark.h>

#include <string>

#include "chartbench/chart.hpp"
#include "chartbench/image.hpp"
#include "chartbench/preprocess.hpp"

using namespace chartbench;

namespace {

Table bench_table(int rows, int cols) {
  Table t;
  for (int j = 0; j < cols; ++j) t.col_headers.push_back("series" + std::to_string(j));
  for (int i = 0; i < rows; ++i) {
    TableRow row;
    row.label = "label" + std::to_string(i);
    for (int j = 0; j < cols; ++j) row.cells.push_back(Cell::of_number(3.0 * i + j + 1));
    t.rows.push_back(std::move(row));
  }
  return t;
}

void BM_RenderBar(benchmark::State& state) {
  ChartSpec spec = build_chart_spec(bench_table(static_cast<int>(state.range(0)), 2),
                                    ChartType::bar, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_chart(spec));
  }
}
BENCHMARK(BM_RenderBar)->Arg(4)->Arg(16);

void BM_RenderPie(benchmark::State& state) {
  ChartSpec spec = build_chart_spec(bench_table(6, 1), ChartType::pie, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_chart(spec));
  }
}
BENCHMARK(BM_RenderPie);

void BM_Banner(benchmark::State& state) {
  Image img = Image::blank(640, 480, Rgb{255, 255, 255});
  RowColAnnotation ann = annotation_from_table(bench_table(12, 3));
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_row_col_banner(img, ann));
  }
}
BENCHMARK(BM_Banner);

void BM_EncodePng(benchmark::State& state) {
  Image img = render_chart(build_chart_spec(bench_table(8, 2), ChartType::line, 1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(encode_png(img));
  }
}
BENCHMARK(BM_EncodePng);

void BM_TrainingTriple(benchmark::State& state) {
  Table t = bench_table(6, 2);
  Image original = render_chart(build_chart_spec(t, ChartType::bar, 1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(make_training_triple(original, t, ChartType::bar, 5));
  }
}
BENCHMARK(BM_TrainingTriple);

}  // namespace
