#include "chartbench/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chartbench/error.hpp"

namespace chartbench {
namespace {

void check_same_dim(const Vec& a, const Vec& b, const char* what) {
  if (a.size() != b.size()) {
    raise(Errc::DimensionMismatch, std::string(what) + ": " + std::to_string(a.size()) +
                                       " vs " + std::to_string(b.size()));
  }
}

void check_logits(const LogitsSeq& seq) {
  if (seq.logits.empty() || seq.logits.size() != seq.targets.size()) {
    raise(Errc::BadLogits, "need one target per logits row, n >= 1");
  }
  const std::size_t classes = seq.logits[0].size();
  if (classes == 0) raise(Errc::BadLogits, "zero classes");
  for (std::size_t i = 0; i < seq.logits.size(); ++i) {
    if (seq.logits[i].size() != classes) raise(Errc::BadLogits, "ragged logits matrix");
    if (seq.targets[i] < 0 || static_cast<std::size_t>(seq.targets[i]) >= classes) {
      raise(Errc::BadLogits, "target index " + std::to_string(seq.targets[i]) +
                                 " out of range at position " + std::to_string(i));
    }
  }
}

std::vector<double> softmax_row(const std::vector<double>& logits) {
  double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double denom = 0.0;
  for (std::size_t c = 0; c < logits.size(); ++c) {
    out[c] = std::exp(logits[c] - peak);
    denom += out[c];
  }
  for (double& p : out) p /= denom;
  return out;
}

}  // namespace

double l2_distance(const Vec& a, const Vec& b) {
  check_same_dim(a, b, "l2_distance");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double triplet_loss(const Vec& anchor, const Vec& positive, const Vec& negative, double margin) {
  check_same_dim(anchor, positive, "triplet_loss anchor/positive");
  check_same_dim(anchor, negative, "triplet_loss anchor/negative");
  return std::max(l2_distance(anchor, positive) - l2_distance(anchor, negative) + margin, 0.0);
}

TripletGradients triplet_loss_gradients(const Vec& anchor, const Vec& positive,
                                        const Vec& negative, double margin) {
  check_same_dim(anchor, positive, "triplet_loss anchor/positive");
  check_same_dim(anchor, negative, "triplet_loss anchor/negative");
  const std::size_t dim = anchor.size();
  TripletGradients g{Vec(dim, 0.0), Vec(dim, 0.0), Vec(dim, 0.0)};

  const double d_ap = l2_distance(anchor, positive);
  const double d_an = l2_distance(anchor, negative);
  if (d_ap - d_an + margin < 0.0) return g;

  for (std::size_t i = 0; i < dim; ++i) {
    double unit_ap = d_ap > 0.0 ? (anchor[i] - positive[i]) / d_ap : 0.0;
    double unit_an = d_an > 0.0 ? (anchor[i] - negative[i]) / d_an : 0.0;
    g.anchor[i] = unit_ap - unit_an;
    g.positive[i] = -unit_ap;
    g.negative[i] = unit_an;
  }
  return g;
}

double token_cross_entropy(const LogitsSeq& seq) {
  check_logits(seq);
  const std::size_t n = seq.logits.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double>& row = seq.logits[i];
    double peak = *std::max_element(row.begin(), row.end());
    double denom = 0.0;
    for (double logit : row) denom += std::exp(logit - peak);
    total += std::log(denom) - (row[seq.targets[i]] - peak);
  }
  return total / static_cast<double>(n);
}

std::vector<std::vector<double>> token_cross_entropy_gradient(const LogitsSeq& seq) {
  check_logits(seq);
  const std::size_t n = seq.logits.size();
  std::vector<std::vector<double>> grad(n);
  for (std::size_t i = 0; i < n; ++i) {
    grad[i] = softmax_row(seq.logits[i]);
    grad[i][seq.targets[i]] -= 1.0;
    for (double& g : grad[i]) g /= static_cast<double>(n);
  }
  return grad;
}

double combined_loss(double triplet, double table, double lambda) {
  if (lambda < 0.0 || lambda > 1.0) {
    raise(Errc::LambdaOutOfRange, "lambda must be in [0, 1], got " + std::to_string(lambda));
  }
  return lambda * triplet + (1.0 - lambda) * table;
}

}  // namespace chartbench
