#include "chartbench/preprocess.hpp"

#include <fstream>
#include <sstream>

#include "nlohmann/json.hpp"

#include "chartbench/error.hpp"
#include "font5x7.hpp"

namespace chartbench {
namespace {

struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform draw in [0, bound); multiply-shift keeps the sequence identical
  // across platforms, unlike std::uniform_int_distribution.
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }
};

template <typename T>
void shuffle_in_place(std::vector<T>& items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

std::string join_labels(const std::vector<std::string>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ", ";
    out += labels[i];
  }
  return out;
}

// Greedy word wrap; a single word longer than the line is cut with "...".
std::vector<std::string> wrap_text(const std::string& text, int max_chars) {
  std::vector<std::string> lines;
  std::istringstream words(text);
  std::string word, line;
  while (words >> word) {
    if (static_cast<int>(word.size()) > max_chars) {
      word = word.substr(0, std::max(0, max_chars - 3)) + "...";
    }
    if (line.empty()) {
      line = word;
    } else if (static_cast<int>(line.size() + 1 + word.size()) <= max_chars) {
      line += " " + word;
    } else {
      lines.push_back(line);
      line = word;
    }
  }
  if (!line.empty()) lines.push_back(line);
  if (lines.empty()) lines.push_back("");
  return lines;
}

}  // namespace

const char* annotation_origin_name(AnnotationOrigin origin) {
  return origin == AnnotationOrigin::ground_truth ? "ground_truth" : "lmm_extracted";
}

RowColAnnotation annotation_from_table(const Table& table) {
  RowColAnnotation ann;
  for (const TableRow& row : table.rows) ann.rows.push_back(row.label);
  ann.cols = table.col_headers;
  ann.origin = AnnotationOrigin::ground_truth;
  return ann;
}

void write_annotation_sidecar(const RowColAnnotation& ann, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["rows"] = ann.rows;
  doc["cols"] = ann.cols;
  doc["origin"] = annotation_origin_name(ann.origin);
  std::ofstream out(path);
  if (!out) raise(Errc::IoError, "cannot write sidecar: " + path.string());
  out << doc.dump(2) << "\n";
}

RowColAnnotation read_annotation_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot read sidecar: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::MalformedJson, path.string() + ": " + e.what());
  }
  RowColAnnotation ann;
  ann.rows = doc.at("rows").get<std::vector<std::string>>();
  ann.cols = doc.at("cols").get<std::vector<std::string>>();
  ann.origin = doc.at("origin").get<std::string>() == "lmm_extracted"
                   ? AnnotationOrigin::lmm_extracted
                   : AnnotationOrigin::ground_truth;
  return ann;
}

Table generate_negative(const Table& table, std::uint64_t seed) {
  // Positions of numeric cells across the whole grid.
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t c = 0; c < table.rows[r].cells.size(); ++c) {
      if (table.rows[r].cells[c].is_numeric()) slots.emplace_back(r, c);
    }
  }
  if (slots.size() < 2) {
    raise(Errc::TooFewValues,
          "need at least 2 numeric cells to shuffle, got " + std::to_string(slots.size()));
  }

  bool all_equal = true;
  for (const auto& [r, c] : slots) {
    if (*table.rows[r].cells[c].numeric != *table.rows[slots[0].first].cells[slots[0].second].numeric) {
      all_equal = false;
      break;
    }
  }

  SplitMix64 rng(seed);
  Table out = table;
  bool displaced = false;
  for (int attempt = 0; attempt < 16 && !displaced; ++attempt) {
    std::vector<Cell> values;
    values.reserve(slots.size());
    for (const auto& [r, c] : slots) values.push_back(table.rows[r].cells[c]);
    shuffle_in_place(values, rng);

    for (std::size_t k = 0; k < slots.size(); ++k) {
      const auto& [r, c] = slots[k];
      if (*values[k].numeric != *table.rows[r].cells[c].numeric) displaced = true;
      out.rows[r].cells[c] = values[k];
    }
    if (all_equal) break;
  }
  if (!displaced && !all_equal) {
    // All draws landed value-identical; swap the first differing pair so the
    // negative is never a value-level no-op.
    for (std::size_t k = 1; k < slots.size(); ++k) {
      auto& first = out.rows[slots[0].first].cells[slots[0].second];
      auto& other = out.rows[slots[k].first].cells[slots[k].second];
      if (*first.numeric != *other.numeric) {
        std::swap(first, other);
        break;
      }
    }
  }
  out.source_id = table.source_id;
  return out;
}

Image render_row_col_banner(const Image& image, const RowColAnnotation& ann) {
  const int pad = 4;
  const int line_height = detail::kGlyphHeight + 3;
  const int max_chars = std::max(1, (image.width - 2 * pad) / detail::kGlyphAdvance);

  std::vector<std::string> lines;
  for (const std::string& text :
       {"Rows: " + join_labels(ann.rows), "Columns: " + join_labels(ann.cols)}) {
    for (std::string& line : wrap_text(text, max_chars)) lines.push_back(std::move(line));
  }

  const int banner_height = pad * 2 + static_cast<int>(lines.size()) * line_height;
  Image out = Image::blank(image.width, image.height + banner_height, Rgb{255, 255, 255});
  out.provenance = "annotated";

  for (int y = 0; y < banner_height - 1; ++y) {
    for (int x = 0; x < out.width; ++x) out.set(x, y, Rgb{236, 236, 236});
  }
  for (int x = 0; x < out.width; ++x) out.set(x, banner_height - 1, Rgb{120, 120, 120});
  for (std::size_t i = 0; i < lines.size(); ++i) {
    detail::draw_text(out, pad, pad + static_cast<int>(i) * line_height, lines[i],
                      Rgb{20, 20, 20});
  }

  std::copy(image.pixels.begin(), image.pixels.end(),
            out.pixels.begin() + static_cast<std::size_t>(banner_height) * image.width * 3);
  return out;
}

TrainingTriple make_training_triple(const Image& original, const Table& table, ChartType type,
                                    std::uint64_t seed) {
  RowColAnnotation ann = annotation_from_table(table);

  ChartSpec positive_spec = build_chart_spec(table, type, seed);
  Table shuffled = generate_negative(table, seed);
  ChartSpec negative_spec = build_chart_spec(shuffled, type, seed);

  TrainingTriple triple;
  triple.anchor = render_row_col_banner(original, ann);
  triple.positive = render_row_col_banner(render_chart(positive_spec), ann);
  triple.negative = render_row_col_banner(render_chart(negative_spec), ann);
  triple.positive.provenance = "simple";
  triple.negative.provenance = "negative";
  return triple;
}

}  // namespace chartbench
