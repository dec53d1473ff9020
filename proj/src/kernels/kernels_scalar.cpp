#include "sono/kernels.hpp"

namespace sono::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double* y, double alpha, const double* x, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_scalar(const double* A, std::size_t rows, std::size_t cols, const double* x,
                 const double* bias, double* y) noexcept {
  for (std::size_t r = 0; r < rows; ++r) {
    double s = dot_scalar(A + r * cols, x, cols);
    y[r] = bias ? s + bias[r] : s;
  }
}

void gemv_t_acc_scalar(const double* A, std::size_t rows, std::size_t cols, const double* c,
                       double* y) noexcept {
  for (std::size_t r = 0; r < rows; ++r) {
    if (c[r] == 0.0) continue;
    axpy_scalar(y, c[r], A + r * cols, cols);
  }
}

void ger_acc_scalar(double* G, std::size_t rows, std::size_t cols, double alpha, const double* c,
                    const double* x) noexcept {
  for (std::size_t r = 0; r < rows; ++r) {
    const double s = alpha * c[r];
    if (s == 0.0) continue;
    axpy_scalar(G + r * cols, s, x, cols);
  }
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{Backend::Scalar, dot_scalar, axpy_scalar, gemv_scalar,
                                 gemv_t_acc_scalar, ger_acc_scalar};
  return table;
}

}  // namespace sono::kernels
