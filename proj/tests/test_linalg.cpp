#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sono/linalg.hpp"

namespace sono {
namespace {

TEST(L2Normalize, ThreeFourFive) {
  const Vector v = l2_normalize(Vector{3.0, 4.0});
  EXPECT_NEAR(v[0], 0.6, 1e-15);
  EXPECT_NEAR(v[1], 0.8, 1e-15);
}

TEST(L2Normalize, UnitVectorUnchanged) {
  EXPECT_EQ(l2_normalize(Vector{1.0, 0.0, 0.0}), (Vector{1.0, 0.0, 0.0}));
}

TEST(L2Normalize, ZeroVectorThrows) {
  try {
    l2_normalize(Vector{0.0, 0.0});
    FAIL() << "expected ZeroNorm";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroNorm);
  }
  EXPECT_THROW(l2_normalize(Vector{1e-13, 0.0}), Error);
}

TEST(L2Normalize, Idempotent) {
  Philox rng(11);
  for (int i = 0; i < 200; ++i) {
    const Vector v = test::random_vector(rng, 1 + rng.below(40), -5.0, 5.0);
    const Vector once = l2_normalize(v);
    EXPECT_LE(test::max_abs_diff(l2_normalize(once), once), 1e-12);
    EXPECT_NEAR(norm2(once), 1.0, 1e-12);
  }
}

TEST(CosineSimilarity, ClosedForms) {
  const Vector u{0.3, -1.2, 2.0};
  EXPECT_NEAR(cosine_similarity(u, u), 1.0, 1e-15);
  EXPECT_EQ(cosine_similarity(Vector{1, 0}, Vector{0, 1}), 0.0);
  EXPECT_NEAR(cosine_similarity(Vector{1, 1}, Vector{1, 0}), 0.70710678118654752, 1e-9);
}

TEST(CosineSimilarity, Errors) {
  try {
    cosine_similarity(Vector{1, 2}, Vector{1, 2, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimMismatch);
  }
  try {
    cosine_similarity(Vector{0, 0}, Vector{1, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroNorm);
  }
}

TEST(CosineSimilarity, ScaleInvariant) {
  Philox rng(12);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + rng.below(30);
    const Vector u = test::random_vector(rng, n);
    const Vector v = test::random_vector(rng, n);
    const double alpha = rng.uniform(0.01, 100.0);
    const double beta = rng.uniform(0.01, 100.0);
    Vector su = u, sv = v;
    for (double& x : su) x *= alpha;
    for (double& x : sv) x *= beta;
    EXPECT_NEAR(cosine_similarity(su, sv), cosine_similarity(u, v), 1e-9);
  }
}

TEST(Softmax, UniformForEqualLogits) {
  const Vector p = softmax(Vector{2.5, 2.5, 2.5, 2.5}, 1.0);
  for (double x : p) EXPECT_DOUBLE_EQ(x, 0.25);
}

TEST(Softmax, LogTwo) {
  const Vector p = softmax(Vector{std::log(2.0), 0.0}, 1.0);
  EXPECT_NEAR(p[0], 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(p[1], 1.0 / 3.0, 1e-9);
}

TEST(Softmax, NonPositiveTemperatureThrows) {
  for (double t : {0.0, -1.0}) {
    try {
      softmax(Vector{1, 2}, t);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NonPositiveTemperature);
    }
  }
}

TEST(Softmax, ShiftInvariantAndNormalized) {
  Philox rng(13);
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 1 + rng.below(20);
    const Vector l = test::random_vector(rng, n, -50.0, 50.0);
    const double c = rng.uniform(-100.0, 100.0);
    const double tau = rng.uniform(0.05, 3.0);
    Vector shifted = l;
    for (double& x : shifted) x += c;
    const Vector p = softmax(l, tau);
    double sum = 0.0;
    for (double x : p) {
      EXPECT_GT(x, 0.0 - 1e-300);
      sum += x;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    EXPECT_LE(test::max_abs_diff(p, softmax(shifted, tau)), 1e-9);
  }
}

TEST(CrossEntropy, ClosedForms) {
  EXPECT_EQ(cross_entropy(Vector{1, 0, 0}, 0), 0.0);
  EXPECT_NEAR(cross_entropy(Vector{0.25, 0.25, 0.25, 0.25}, 3), 1.3862943611198906, 1e-9);
  EXPECT_NEAR(cross_entropy(Vector{0, 1}, 0), 27.631021115928547, 1e-9);
}

TEST(CrossEntropy, LabelOutOfRange) {
  try {
    cross_entropy(Vector{0.5, 0.5}, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IndexOutOfRange);
  }
}

TEST(CrossEntropy, MatchesLogSumExpForm) {
  Philox rng(14);
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 2 + rng.below(10);
    const Vector l = test::random_vector(rng, n, -10.0, 10.0);
    const std::size_t k = rng.below(n);
    const double expected = logsumexp(l) - l[k];
    if (expected > 25.0) continue;  // the clamp dominates out there
    EXPECT_NEAR(cross_entropy(softmax(l), k), expected, 1e-9);
  }
}

TEST(Argmax, TiesPickLowestIndex) {
  EXPECT_EQ(argmax(Vector{1, 3, 3, 2}), 1u);
  EXPECT_EQ(argmax(Vector{5, 5}), 0u);
}

TEST(Matrix, RejectsMismatchedData) {
  EXPECT_THROW(Matrix(2, 2, Vector{1, 2, 3}), Error);
  const Matrix m(2, 3, Vector{1, 2, 3, 4, 5, 6});
  EXPECT_EQ(matvec(m, Vector{1, 0, -1}), (Vector{-2, -2}));
}

}  // namespace
}  // namespace sono
