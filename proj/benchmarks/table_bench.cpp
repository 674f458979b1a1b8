#include <benchmark/benchmark.h>

#include <string>

#include "chartbench/table.hpp"

using namespace chartbench;

namespace {

Table make_table(int rows, int cols) {
  Table t;
  for (int j = 0; j < cols; ++j) t.col_headers.push_back("col" + std::to_string(j));
  for (int i = 0; i < rows; ++i) {
    TableRow row;
    row.label = "row" + std::to_string(i);
    for (int j = 0; j < cols; ++j) row.cells.push_back(Cell::of_number(i * 3.25 + j));
    t.rows.push_back(std::move(row));
  }
  return t;
}

void BM_SerializeLinearized(benchmark::State& state) {
  Table t = make_table(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(serialize_linearized(t));
  }
}
BENCHMARK(BM_SerializeLinearized)->Arg(8)->Arg(64);

void BM_ParseLinearized(benchmark::State& state) {
  std::string text = serialize_linearized(make_table(static_cast<int>(state.range(0)), 4));
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_linearized(text));
  }
}
BENCHMARK(BM_ParseLinearized)->Arg(8)->Arg(64);

void BM_ParseNumeric(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_numeric("$1,234.56 million"));
  }
}
BENCHMARK(BM_ParseNumeric);

}  // namespace

BENCHMARK_MAIN();
