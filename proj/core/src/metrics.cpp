#include "chartbench/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

#include "chartbench/error.hpp"

namespace chartbench {
namespace {

double harmonic_mean(double p, double r) { return p + r > 0 ? 2.0 * p * r / (p + r) : 0.0; }

std::string fold_trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Jonker-Volgenant style shortest augmenting path solver on a square matrix.
// Produces an optimal row->col assignment together with feasible dual
// potentials (u[i] + v[j] <= a[i][j], with equality on matched cells).
void solve_square_assignment(const std::vector<std::vector<double>>& a,
                             std::vector<int>& row_to_col, std::vector<double>& u_out,
                             std::vector<double>& v_out) {
  const int n = static_cast<int>(a.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  row_to_col.assign(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] >= 1) row_to_col[p[j] - 1] = j - 1;
  }
  u_out.assign(n, 0.0);
  v_out.assign(n, 0.0);
  for (int i = 1; i <= n; ++i) u_out[i - 1] = u[i];
  for (int j = 1; j <= n; ++j) v_out[j - 1] = v[j];
}

// Alternating-path search in the tight-edge graph. Rows already fixed by the
// lexicographic pass and their columns are off limits.
bool augment(int row, const std::vector<std::vector<int>>& tight,
             const std::vector<char>& col_locked, std::vector<char>& visited,
             std::vector<int>& match_row_to_col, std::vector<int>& match_col_to_row,
             int fixed_rows) {
  for (int j : tight[row]) {
    if (col_locked[j] || visited[j]) continue;
    visited[j] = 1;
    int owner = match_col_to_row[j];
    if (owner == -1 || (owner >= fixed_rows &&
                        augment(owner, tight, col_locked, visited, match_row_to_col,
                                match_col_to_row, fixed_rows))) {
      match_row_to_col[row] = j;
      match_col_to_row[j] = row;
      return true;
    }
  }
  return false;
}

struct EntityView {
  std::vector<EntityMapping> entities;
  std::vector<std::string> keys;
};

EntityView make_view(const Table& table, bool numeric_only) {
  EntityView view;
  std::vector<EntityMapping> all = to_entity_mappings(table);
  for (EntityMapping& e : all) {
    if (numeric_only && !e.value.is_numeric()) continue;
    view.keys.push_back(e.key());
    view.entities.push_back(std::move(e));
  }
  return view;
}

CostMatrix key_cost_matrix(const EntityView& pred, const EntityView& truth, double tau) {
  CostMatrix cost(pred.keys.size(), std::vector<double>(truth.keys.size(), 0.0));
  for (std::size_t i = 0; i < pred.keys.size(); ++i) {
    for (std::size_t j = 0; j < truth.keys.size(); ++j) {
      cost[i][j] = normalized_levenshtein(pred.keys[i], truth.keys[j], tau);
    }
  }
  return cost;
}

double value_similarity(const Cell& predicted, const Cell& truth, double tau, double theta) {
  if (truth.is_numeric() && predicted.is_numeric()) {
    return 1.0 - relative_distance(*predicted.numeric, *truth.numeric, theta);
  }
  if (!truth.is_numeric() && !predicted.is_numeric()) {
    return 1.0 - normalized_levenshtein(predicted.raw, truth.raw, tau);
  }
  return 0.0;
}

ScoreTriple matched_similarity_scores(const EntityView& pred, const EntityView& truth,
                                      double tau,
                                      const std::function<double(const EntityMapping&,
                                                                 const EntityMapping&)>& pair_score) {
  const std::size_t n = pred.entities.size();
  const std::size_t m = truth.entities.size();
  if (n == 0 && m == 0) return ScoreTriple{1.0, 1.0, 1.0};

  MatchResult match = minimal_cost_matching(key_cost_matrix(pred, truth, tau));
  double sum = 0.0;
  for (const auto& [i, j] : match.assignment) {
    sum += pair_score(pred.entities[i], truth.entities[j]);
  }
  ScoreTriple s;
  s.precision = n > 0 ? sum / static_cast<double>(n) : 0.0;
  s.recall = m > 0 ? sum / static_cast<double>(m) : 0.0;
  s.f1 = harmonic_mean(s.precision, s.recall);
  return s;
}

}  // namespace

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() > b.size()) std::swap(a, b);
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::size_t> row(n + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t j = 1; j <= m; ++j) {
    std::size_t prev = row[0];
    row[0] = j;
    for (std::size_t i = 1; i <= n; ++i) {
      std::size_t cur = row[i];
      row[i] = std::min({row[i] + 1, row[i - 1] + 1, prev + (a[i - 1] == b[j - 1] ? 0 : 1)});
      prev = cur;
    }
  }
  return row[n];
}

double normalized_levenshtein(std::string_view a, std::string_view b, double tau) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 0.0;
  double nl = static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
  return nl <= tau ? nl : 1.0;
}

double relative_distance(double predicted, double truth, double theta) {
  double d;
  if (predicted == truth) {
    d = 0.0;
  } else if (truth == 0.0) {
    d = 1.0;
  } else {
    d = std::min(1.0, std::abs(predicted - truth) / std::abs(truth));
  }
  return d <= theta ? d : 1.0;
}

double entity_similarity(const EntityMapping& predicted, const EntityMapping& truth,
                         double tau, double theta) {
  double key_factor = 1.0 - normalized_levenshtein(predicted.key(), truth.key(), tau);
  return key_factor * value_similarity(predicted.value, truth.value, tau, theta);
}

MatchResult minimal_cost_matching(const CostMatrix& cost) {
  MatchResult out;
  out.cost_matrix = cost;
  const int n = static_cast<int>(cost.size());
  const int m = n > 0 ? static_cast<int>(cost[0].size()) : 0;
  for (const auto& row : cost) {
    if (static_cast<int>(row.size()) != m) {
      raise(Errc::LengthMismatch, "ragged cost matrix");
    }
  }
  if (n == 0 || m == 0) return out;

  const int k = std::max(n, m);
  std::vector<std::vector<double>> padded(k, std::vector<double>(k, 1.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) padded[i][j] = cost[i][j];
  }

  std::vector<int> match_row_to_col;
  std::vector<double> u, v;
  solve_square_assignment(padded, match_row_to_col, u, v);

  // Every optimal assignment lives in the graph of tight cells
  // (reduced cost zero under the optimal duals). Re-walk the rows in order,
  // steering each one toward its lowest feasible column; a repair search
  // keeps the matching perfect after each re-assignment.
  constexpr double kTightEps = 1e-9;
  std::vector<std::vector<int>> tight(k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (padded[i][j] - u[i] - v[j] <= kTightEps) tight[i].push_back(j);
    }
  }
  std::vector<int> match_col_to_row(k, -1);
  for (int i = 0; i < k; ++i) match_col_to_row[match_row_to_col[i]] = i;

  std::vector<char> col_locked(k, 0);
  for (int i = 0; i < n; ++i) {
    for (int j : tight[i]) {
      if (col_locked[j]) continue;
      if (match_row_to_col[i] == j) break;
      // Tentatively hand column j to row i and let its previous owner look
      // for a replacement among later rows.
      const int prev_owner = match_col_to_row[j];
      const int prev_col = match_row_to_col[i];
      match_row_to_col[i] = j;
      match_col_to_row[j] = i;
      match_row_to_col[prev_owner] = -1;
      match_col_to_row[prev_col] = -1;
      std::vector<char> visited(k, 0);
      visited[j] = 1;
      if (augment(prev_owner, tight, col_locked, visited, match_row_to_col, match_col_to_row,
                  i + 1)) {
        break;
      }
      match_row_to_col[prev_owner] = j;
      match_col_to_row[j] = prev_owner;
      match_row_to_col[i] = prev_col;
      match_col_to_row[prev_col] = i;
    }
    col_locked[match_row_to_col[i]] = 1;
  }

  for (int i = 0; i < n; ++i) {
    int j = match_row_to_col[i];
    if (j < m) {
      out.assignment.emplace_back(i, j);
      out.total_cost += cost[i][j];
    }
  }
  return out;
}

ScoreTriple rd_scores(const Table& predicted, const Table& truth, double theta, double tau) {
  EntityView pred = make_view(predicted, /*numeric_only=*/true);
  EntityView gold = make_view(truth, /*numeric_only=*/true);
  return matched_similarity_scores(pred, gold, tau,
                                   [theta](const EntityMapping& p, const EntityMapping& t) {
                                     return 1.0 - relative_distance(*p.value.numeric,
                                                                    *t.value.numeric, theta);
                                   });
}

ScoreTriple rms_scores(const Table& predicted, const Table& truth, double tau, double theta) {
  EntityView pred = make_view(predicted, /*numeric_only=*/false);
  EntityView gold = make_view(truth, /*numeric_only=*/false);
  return matched_similarity_scores(pred, gold, tau,
                                   [tau, theta](const EntityMapping& p, const EntityMapping& t) {
                                     return entity_similarity(p, t, tau, theta);
                                   });
}

bool relaxed_accuracy(std::string_view predicted, std::string_view gold, double tol) {
  std::optional<double> p = parse_numeric(predicted);
  std::optional<double> g = parse_numeric(gold);
  if (p && g) {
    if (*g == 0.0) return *p == 0.0;
    return std::abs(*p - *g) <= tol * std::abs(*g);
  }
  return fold_trim(predicted) == fold_trim(gold);
}

double corpus_bleu(const std::vector<std::string>& candidates,
                   const std::vector<std::string>& references) {
  if (candidates.size() != references.size()) {
    raise(Errc::LengthMismatch, "candidate count " + std::to_string(candidates.size()) +
                                    " != reference count " + std::to_string(references.size()));
  }
  if (candidates.empty()) return 0.0;

  auto tokenize = [](std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : text) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!cur.empty()) {
          tokens.push_back(cur);
          cur.clear();
        }
      } else {
        cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
  };

  constexpr int kMaxOrder = 4;
  constexpr double kEpsilon = 1e-9;
  std::uint64_t clipped[kMaxOrder] = {0};
  std::uint64_t totals[kMaxOrder] = {0};
  std::uint64_t cand_tokens = 0, ref_tokens = 0;

  for (std::size_t s = 0; s < candidates.size(); ++s) {
    std::vector<std::string> cand = tokenize(candidates[s]);
    std::vector<std::string> ref = tokenize(references[s]);
    cand_tokens += cand.size();
    ref_tokens += ref.size();
    for (int order = 1; order <= kMaxOrder; ++order) {
      auto ngrams = [order](const std::vector<std::string>& toks) {
        std::map<std::string, std::uint64_t> counts;
        if (static_cast<int>(toks.size()) < order) return counts;
        for (std::size_t i = 0; i + order <= toks.size(); ++i) {
          std::string key;
          for (int w = 0; w < order; ++w) {
            if (w) key.push_back('\x1f');
            key += toks[i + w];
          }
          ++counts[key];
        }
        return counts;
      };
      std::map<std::string, std::uint64_t> cand_counts = ngrams(cand);
      std::map<std::string, std::uint64_t> ref_counts = ngrams(ref);
      for (const auto& [gram, count] : cand_counts) {
        auto it = ref_counts.find(gram);
        std::uint64_t limit = it == ref_counts.end() ? 0 : it->second;
        clipped[order - 1] += std::min(count, limit);
        totals[order - 1] += count;
      }
    }
  }

  if (cand_tokens == 0) return 0.0;
  double log_precision = 0.0;
  for (int order = 0; order < kMaxOrder; ++order) {
    double p;
    if (totals[order] == 0) {
      p = 1.0;  // no n-grams of this order exist; vacuous
    } else if (clipped[order] == 0) {
      p = kEpsilon;
    } else {
      p = static_cast<double>(clipped[order]) / static_cast<double>(totals[order]);
    }
    log_precision += 0.25 * std::log(p);
  }
  double brevity = 1.0;
  if (cand_tokens < ref_tokens) {
    brevity = std::exp(1.0 - static_cast<double>(ref_tokens) / static_cast<double>(cand_tokens));
  }
  return brevity * std::exp(log_precision);
}

}  // namespace chartbench
