#include "chartbench/losses.hpp"

#include <cmath>
#include <random>

#include "doctest.h"

#include "chartbench/error.hpp"
#include "test_support.hpp"

using namespace chartbench;
namespace ct = chartbench::testing;

namespace {

Vec random_vec(std::mt19937_64& rng, std::size_t dim, double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vec v(dim);
  for (double& x : v) x = dist(rng);
  return v;
}

LogitsSeq random_logits(std::mt19937_64& rng, std::size_t n, std::size_t classes) {
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  std::uniform_int_distribution<int> target(0, static_cast<int>(classes) - 1);
  LogitsSeq seq;
  seq.logits.assign(n, std::vector<double>(classes));
  for (auto& row : seq.logits) {
    for (double& x : row) x = dist(rng);
  }
  for (std::size_t i = 0; i < n; ++i) seq.targets.push_back(target(rng));
  return seq;
}

}  // namespace

TEST_CASE("l2_distance basics") {
  CHECK(l2_distance({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(l2_distance({0, 0}, {3, 4}) == 5.0);
  try {
    l2_distance({1.0}, {1.0, 2.0});
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DimensionMismatch);
  }
}

TEST_CASE("l2_distance equals an independent summation oracle") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 100; ++i) {
    Vec a = random_vec(rng, 8), b = random_vec(rng, 8);
    long double sum = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      sum += (static_cast<long double>(a[k]) - b[k]) * (static_cast<long double>(a[k]) - b[k]);
    }
    CHECK(l2_distance(a, b) ==
          doctest::Approx(static_cast<double>(std::sqrt(sum))).epsilon(1e-12));
  }
}

TEST_CASE("triplet_loss hinge behavior") {
  Vec anchor{0, 0};
  SUBCASE("inactive when the negative is far enough") {
    CHECK(triplet_loss(anchor, anchor, {2, 0}, 1.0) == 0.0);
  }
  SUBCASE("fully active when anchor equals the negative") {
    CHECK(triplet_loss(anchor, {1, 0}, anchor, 1.0) == 2.0);
  }
  SUBCASE("never negative") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 200; ++i) {
      Vec a = random_vec(rng, 4), p = random_vec(rng, 4), n = random_vec(rng, 4);
      double loss = triplet_loss(a, p, n, 1.0);
      CHECK(loss >= 0.0);
      double gap = l2_distance(a, n) - l2_distance(a, p);
      if (gap >= 1.0) CHECK(loss == 0.0);
    }
  }
}

TEST_CASE("triplet_loss is invariant under rigid 2-D rotations") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> angle_dist(0, 6.28318530717958647);
  for (int i = 0; i < 100; ++i) {
    Vec a = random_vec(rng, 2), p = random_vec(rng, 2), n = random_vec(rng, 2);
    double angle = angle_dist(rng);
    double c = std::cos(angle), s = std::sin(angle);
    auto rotate = [&](const Vec& v) { return Vec{c * v[0] - s * v[1], s * v[0] + c * v[1]}; };
    CHECK(triplet_loss(a, p, n, 1.0) ==
          doctest::Approx(triplet_loss(rotate(a), rotate(p), rotate(n), 1.0)).epsilon(1e-9));
  }
}

TEST_CASE("triplet_loss gradients match central finite differences") {
  std::mt19937_64 rng(44);
  int checked = 0;
  while (checked < 100) {
    Vec a = random_vec(rng, 5), p = random_vec(rng, 5), n = random_vec(rng, 5);
    double margin = 1.0;
    double d_ap = l2_distance(a, p), d_an = l2_distance(a, n);
    // Keep clear of the hinge kink and of coincident points.
    if (std::abs(d_ap - d_an + margin) < 1e-3 || d_ap < 1e-3 || d_an < 1e-3) continue;
    ++checked;
    TripletGradients grads = triplet_loss_gradients(a, p, n, margin);
    auto check_block = [&](Vec& block, const Vec& grad) {
      for (std::size_t k = 0; k < block.size(); ++k) {
        double fd = ct::central_difference([&] { return triplet_loss(a, p, n, margin); },
                                           block[k]);
        CHECK(ct::close_rel(grad[k], fd, 1e-5));
      }
    };
    check_block(a, grads.anchor);
    check_block(p, grads.positive);
    check_block(n, grads.negative);
  }
}

TEST_CASE("token_cross_entropy on fixed cases") {
  SUBCASE("uniform logits cost ln C") {
    LogitsSeq seq{{{0.5, 0.5, 0.5, 0.5}}, {2}};
    CHECK(token_cross_entropy(seq) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  }
  SUBCASE("a +30 logit on the target is free") {
    LogitsSeq seq{{{30.0, 0.0, 0.0}}, {0}};
    CHECK(token_cross_entropy(seq) < 1e-9);
  }
  SUBCASE("mean over positions") {
    LogitsSeq seq{{{1.0, 1.0}, {1.0, 1.0}}, {0, 1}};
    CHECK(token_cross_entropy(seq) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("token_cross_entropy equals a naive softmax oracle") {
  std::mt19937_64 rng(45);
  for (int i = 0; i < 50; ++i) {
    LogitsSeq seq = random_logits(rng, 5, 7);
    double naive = 0.0;
    for (std::size_t pos = 0; pos < seq.logits.size(); ++pos) {
      double denom = 0.0;
      for (double logit : seq.logits[pos]) denom += std::exp(logit);
      naive += -std::log(std::exp(seq.logits[pos][seq.targets[pos]]) / denom);
    }
    naive /= static_cast<double>(seq.logits.size());
    CHECK(token_cross_entropy(seq) == doctest::Approx(naive).epsilon(1e-10));
  }
}

TEST_CASE("token_cross_entropy is invariant to constant logit shifts") {
  std::mt19937_64 rng(46);
  for (int i = 0; i < 50; ++i) {
    LogitsSeq seq = random_logits(rng, 4, 5);
    LogitsSeq shifted = seq;
    std::uniform_real_distribution<double> shift_dist(-50.0, 50.0);
    for (auto& row : shifted.logits) {
      double shift = shift_dist(rng);
      for (double& x : row) x += shift;
    }
    CHECK(token_cross_entropy(seq) ==
          doctest::Approx(token_cross_entropy(shifted)).epsilon(1e-9));
  }
}

TEST_CASE("token_cross_entropy gradient matches finite differences") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    LogitsSeq seq = random_logits(rng, 3, 4);
    auto grads = token_cross_entropy_gradient(seq);
    for (std::size_t i = 0; i < seq.logits.size(); ++i) {
      for (std::size_t c = 0; c < seq.logits[i].size(); ++c) {
        double fd = ct::central_difference([&] { return token_cross_entropy(seq); },
                                           seq.logits[i][c]);
        CHECK(ct::close_rel(grads[i][c], fd, 1e-5, 1e-7));
      }
    }
  }
}

TEST_CASE("token_cross_entropy validates its input") {
  CHECK_THROWS_AS(token_cross_entropy(LogitsSeq{}), Error);
  CHECK_THROWS_AS(token_cross_entropy(LogitsSeq{{{1.0, 2.0}}, {5}}), Error);
  CHECK_THROWS_AS(token_cross_entropy(LogitsSeq{{{1.0, 2.0}, {1.0}}, {0, 0}}), Error);
}

TEST_CASE("combined_loss weighting") {
  CHECK(combined_loss(2.0, 1.0, 0.1) == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(combined_loss(5.0, 3.0, 0.0) == 3.0);
  CHECK(combined_loss(5.0, 3.0, 1.0) == 5.0);
  try {
    combined_loss(1.0, 1.0, 1.5);
    FAIL("expected LambdaOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::LambdaOutOfRange);
  }
}

TEST_CASE("combined_loss is linear in each argument") {
  std::mt19937_64 rng(48);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    double a = dist(rng), b = dist(rng), c = dist(rng), lambda = 0.3;
    CHECK(combined_loss(a + c, b, lambda) ==
          doctest::Approx(combined_loss(a, b, lambda) + lambda * c).epsilon(1e-12));
    CHECK(combined_loss(a, b + c, lambda) ==
          doctest::Approx(combined_loss(a, b, lambda) + (1 - lambda) * c).epsilon(1e-12));
    CHECK(combined_loss(2 * a, 2 * b, lambda) ==
          doctest::Approx(2 * combined_loss(a, b, lambda)).epsilon(1e-12));
  }
}
