#pragma once

#include <vector>

namespace chartbench {

// Embedding vector; all entries finite.
using Vec = std::vector<double>;

inline constexpr double kDefaultMargin = 1.0;
inline constexpr double kDefaultLambda = 0.1;

// Euclidean distance ||a - b||_2.
double l2_distance(const Vec& a, const Vec& b);

// Hinge objective max(d(anchor, positive) - d(anchor, negative) + margin, 0).
double triplet_loss(const Vec& anchor, const Vec& positive, const Vec& negative,
                    double margin = kDefaultMargin);

struct TripletGradients {
  Vec anchor;
  Vec positive;
  Vec negative;
};

// Analytic partial derivatives of triplet_loss at a point where both
// distances are non-zero. When the hinge is inactive all gradients are zero;
// at the hinge kink itself the one-sided (active) gradient is returned.
TripletGradients triplet_loss_gradients(const Vec& anchor, const Vec& positive,
                                        const Vec& negative, double margin = kDefaultMargin);

// Token logits for one generated sequence. logits is n x C row-major,
// targets holds n class indices in [0, C).
struct LogitsSeq {
  std::vector<std::vector<double>> logits;
  std::vector<int> targets;
};

// Mean over positions of -log softmax(logits_i)[target_i], computed with
// max-subtraction.
double token_cross_entropy(const LogitsSeq& seq);

// d loss / d logits, an n x C matrix: (softmax - one_hot) / n per position.
std::vector<std::vector<double>> token_cross_entropy_gradient(const LogitsSeq& seq);

// lambda * triplet + (1 - lambda) * table, lambda in [0, 1].
double combined_loss(double triplet, double table, double lambda = kDefaultLambda);

}  // namespace chartbench
