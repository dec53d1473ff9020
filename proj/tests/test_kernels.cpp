#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sono/kernels.hpp"

namespace sono {
namespace {

using kernels::KernelTable;

// Tolerance for reordered double sums of O(1) terms.
double tol(std::size_t n) { return 1e-14 * static_cast<double>(n + 1); }

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    avx = kernels::avx2_table();
    if (!avx) GTEST_SKIP() << "AVX2 backend not available on this machine";
  }
  const KernelTable& ref = kernels::scalar_table();
  const KernelTable* avx = nullptr;
  Philox rng{2024, 1};
};

TEST_F(KernelEquivalence, DotMatchesScalarAcrossTailLengths) {
  for (std::size_t n = 0; n <= 67; ++n) {
    const Vector a = test::random_vector(rng, n);
    const Vector b = test::random_vector(rng, n);
    EXPECT_NEAR(avx->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n), tol(n)) << n;
  }
}

TEST_F(KernelEquivalence, AxpyMatchesScalar) {
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 33u, 257u}) {
    const Vector x = test::random_vector(rng, n);
    Vector y1 = test::random_vector(rng, n);
    Vector y2 = y1;
    ref.axpy(y1.data(), -0.37, x.data(), n);
    avx->axpy(y2.data(), -0.37, x.data(), n);
    EXPECT_LE(test::max_abs_diff(y1, y2), 1e-15) << n;
  }
}

TEST_F(KernelEquivalence, GemvWithAndWithoutBias) {
  for (auto [rows, cols] : {std::pair{1, 1}, {3, 5}, {4, 4}, {7, 33}, {16, 16}, {33, 65}}) {
    const Vector a = test::random_vector(rng, rows * cols);
    const Vector x = test::random_vector(rng, cols);
    const Vector bias = test::random_vector(rng, rows);
    Vector y1(rows), y2(rows);
    ref.gemv(a.data(), rows, cols, x.data(), bias.data(), y1.data());
    avx->gemv(a.data(), rows, cols, x.data(), bias.data(), y2.data());
    EXPECT_LE(test::max_abs_diff(y1, y2), tol(cols));
    ref.gemv(a.data(), rows, cols, x.data(), nullptr, y1.data());
    avx->gemv(a.data(), rows, cols, x.data(), nullptr, y2.data());
    EXPECT_LE(test::max_abs_diff(y1, y2), tol(cols));
  }
}

TEST_F(KernelEquivalence, TransposedGemvAndOuterProduct) {
  for (auto [rows, cols] : {std::pair{1, 1}, {5, 3}, {8, 8}, {17, 31}}) {
    const Vector a = test::random_vector(rng, rows * cols);
    Vector c = test::random_vector(rng, rows);
    c[0] = 0.0;  // exercised skip path
    const Vector x = test::random_vector(rng, cols);
    Vector y1 = test::random_vector(rng, cols);
    Vector y2 = y1;
    ref.gemv_t_acc(a.data(), rows, cols, c.data(), y1.data());
    avx->gemv_t_acc(a.data(), rows, cols, c.data(), y2.data());
    EXPECT_LE(test::max_abs_diff(y1, y2), tol(rows));

    Vector g1 = a, g2 = a;
    ref.ger_acc(g1.data(), rows, cols, 0.5, c.data(), x.data());
    avx->ger_acc(g2.data(), rows, cols, 0.5, c.data(), x.data());
    EXPECT_LE(test::max_abs_diff(g1, g2), 1e-15);
  }
}

TEST(KernelReference, ScalarKernelsOnHandValues) {
  const auto& k = kernels::scalar_table();
  const double a[] = {1, 2, 3};
  const double b[] = {4, -5, 6};
  EXPECT_EQ(k.dot(a, b, 3), 12.0);
  // [[1,2,3],[4,-5,6]] * [1,1,1] + [0.5, -0.5]
  const double m[] = {1, 2, 3, 4, -5, 6};
  const double ones[] = {1, 1, 1};
  const double bias[] = {0.5, -0.5};
  double y[2];
  k.gemv(m, 2, 3, ones, bias, y);
  EXPECT_EQ(y[0], 6.5);
  EXPECT_EQ(y[1], 4.5);
  double yt[3] = {0, 0, 0};
  const double c[] = {1, 2};
  k.gemv_t_acc(m, 2, 3, c, yt);
  EXPECT_EQ(yt[0], 9.0);
  EXPECT_EQ(yt[1], -8.0);
  EXPECT_EQ(yt[2], 15.0);
}

TEST(KernelDispatch, SelectBackendSwitchesActiveTable) {
  const auto original = kernels::active().backend;
  ASSERT_TRUE(kernels::select_backend(kernels::Backend::Scalar));
  EXPECT_EQ(kernels::active().backend, kernels::Backend::Scalar);
  if (kernels::avx2_table()) {
    ASSERT_TRUE(kernels::select_backend(kernels::Backend::Avx2));
    EXPECT_EQ(kernels::active().backend, kernels::Backend::Avx2);
  } else {
    EXPECT_FALSE(kernels::select_backend(kernels::Backend::Avx2));
  }
  kernels::select_backend(original);
}

}  // namespace
}  // namespace sono
