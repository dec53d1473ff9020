#pragma once

/** \file kernels.hpp
 *  \brief Dense double-precision inner loops with runtime-selected backends.
 *
 * Every kernel has a portable scalar reference implementation. On x86-64 an
 * AVX2+FMA variant is compiled separately and chosen at startup when the CPU
 * supports it. The two backends agree to within a few ulps per accumulated
 * term; they are not bit-identical because the vector path reorders sums.
 *
 * Set SONO_KERNELS=scalar in the environment to force the reference path.
 *
 * Matrices are row-major with an explicit row count and column count.
 * Thread-safety: all kernels are pure over their arguments.
 */

#include <cstddef>
#include <string_view>

namespace sono::kernels {

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  Backend backend;
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n) noexcept;
  /// y[i] += alpha * x[i]
  void (*axpy)(double* y, double alpha, const double* x, std::size_t n) noexcept;
  /// y = A x (+ bias when bias != nullptr); A is rows x cols
  void (*gemv)(const double* A, std::size_t rows, std::size_t cols, const double* x,
               const double* bias, double* y) noexcept;
  /// y += A^T c; A is rows x cols, c has rows entries, y has cols entries
  void (*gemv_t_acc)(const double* A, std::size_t rows, std::size_t cols, const double* c,
                     double* y) noexcept;
  /// G += alpha * c x^T; G is rows x cols
  void (*ger_acc)(double* G, std::size_t rows, std::size_t cols, double alpha, const double* c,
                  const double* x) noexcept;
};

const KernelTable& scalar_table() noexcept;

/// Returns the AVX2 table, or nullptr when it was not compiled in or the CPU
/// lacks AVX2/FMA.
const KernelTable* avx2_table() noexcept;

/// The table used by the rest of the library.
const KernelTable& active() noexcept;

/// Overrides the active backend. Returns false if the backend is unavailable.
/// Not thread-safe with respect to concurrent kernel calls.
bool select_backend(Backend backend) noexcept;

std::string_view backend_name(Backend backend) noexcept;

}  // namespace sono::kernels
