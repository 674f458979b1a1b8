#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "chartbench/chart.hpp"
#include "chartbench/image.hpp"
#include "chartbench/table.hpp"

namespace chartbench {

enum class AnnotationOrigin { ground_truth, lmm_extracted };

const char* annotation_origin_name(AnnotationOrigin origin);

// Row and column names intended to appear in an extracted table. Duplicates
// are preserved as-is.
struct RowColAnnotation {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  AnnotationOrigin origin = AnnotationOrigin::ground_truth;

  friend bool operator==(const RowColAnnotation&, const RowColAnnotation&) = default;
};

RowColAnnotation annotation_from_table(const Table& table);

// Sidecar files: `<image>.rowcol.json` with fields rows, cols, origin.
void write_annotation_sidecar(const RowColAnnotation& ann, const std::filesystem::path& path);
RowColAnnotation read_annotation_sidecar(const std::filesystem::path& path);

// Permutes the numeric cell values of the table with a seeded shuffle,
// retrying (up to 16 draws) until at least one value moved; headers, labels
// and non-numeric cells stay untouched, so the value multiset is preserved.
// Requires at least two numeric cells.
Table generate_negative(const Table& table, std::uint64_t seed);

// Returns a copy of the image extended upward by a banner region holding
// "Rows: ..." and "Columns: ..." lines wrapped to the image width. The
// original pixels are untouched below the banner.
Image render_row_col_banner(const Image& image, const RowColAnnotation& ann);

struct TrainingTriple {
  Image anchor;    // original chart, banner applied
  Image positive;  // clean re-render of the table, banner applied
  Image negative;  // value-shuffled re-render, same banner
};

TrainingTriple make_training_triple(const Image& original, const Table& table, ChartType type,
                                    std::uint64_t seed);

}  // namespace chartbench
