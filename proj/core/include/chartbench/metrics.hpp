#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chartbench/table.hpp"

namespace chartbench {

inline constexpr double kDefaultTau = 0.5;
inline constexpr double kDefaultTheta = 1.0;
inline constexpr double kDefaultTolerance = 0.05;

using CostMatrix = std::vector<std::vector<double>>;

// Injective minimum-cost matching between predicted (rows) and ground-truth
// (columns) entities. `assignment` holds min(N, M) pairs sorted by the
// predicted index.
struct MatchResult {
  std::vector<std::pair<int, int>> assignment;
  CostMatrix cost_matrix;
  double total_cost = 0.0;
};

struct ScoreTriple {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  friend bool operator==(const ScoreTriple&, const ScoreTriple&) = default;
};

// Unit-cost edit distance over bytes.
std::size_t levenshtein(std::string_view a, std::string_view b);

// NL_tau: edit distance divided by the longer length (0 when both strings are
// empty), snapped to 1 when it exceeds tau. tau must be in (0, 1].
double normalized_levenshtein(std::string_view a, std::string_view b, double tau = kDefaultTau);

// D_theta: min(1, |p - t| / |t|), with 0 when p == t and 1 when t == 0 != p,
// snapped to 1 when it exceeds theta. theta must be in (0, 1].
double relative_distance(double predicted, double truth, double theta = kDefaultTheta);

// Similarity between two entities: (1 - NL_tau over concatenated keys) times
// the value similarity. Numeric value pairs use 1 - D_theta; when the
// ground-truth value is textual both raws are compared with 1 - NL_tau;
// numeric-vs-text pairs contribute 0.
double entity_similarity(const EntityMapping& predicted, const EntityMapping& truth,
                         double tau = kDefaultTau, double theta = kDefaultTheta);

// Exact minimum-cost assignment. Rectangular inputs are padded internally and
// the padded pairs discarded; ties between optimal assignments are broken
// toward the lowest (pred_index, truth_index) sequence. An empty matrix yields
// an empty assignment.
MatchResult minimal_cost_matching(const CostMatrix& cost);

// Relative-distance scores over the numeric entities of both tables. Keys are
// matched by NL_tau distance; each matched pair then contributes its value
// similarity 1 - D_theta. precision = sum / N, recall = sum / M, f1 harmonic.
// Conventions: N == 0 gives precision 0, M == 0 gives recall 0, and two empty
// sets score (1, 1, 1).
ScoreTriple rd_scores(const Table& predicted, const Table& truth,
                      double theta = kDefaultTheta, double tau = kDefaultTau);

// Relative mapping similarity over all entities: matched pairs contribute
// entity_similarity; same matching and zero-denominator conventions as
// rd_scores.
ScoreTriple rms_scores(const Table& predicted, const Table& truth,
                       double tau = kDefaultTau, double theta = kDefaultTheta);

// Numeric answers compare with relative tolerance (a zero gold requires an
// exact zero); everything else falls back to case-insensitive trimmed string
// equality. The boundary is inclusive: relative error exactly tol is correct.
bool relaxed_accuracy(std::string_view predicted, std::string_view gold,
                      double tol = kDefaultTolerance);

// Corpus-level BLEU-4 with case-folded whitespace tokenization, clipped
// n-gram counts pooled over the corpus, brevity penalty, and 1e-9
// epsilon smoothing for zero clipped counts. Returns a value in [0, 1];
// an empty corpus scores 0.
double corpus_bleu(const std::vector<std::string>& candidates,
                   const std::vector<std::string>& references);

}  // namespace chartbench
