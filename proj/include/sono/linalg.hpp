#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sono/error.hpp"

namespace sono {

using Vector = std::vector<double>;
using ConstSpan = std::span<const double>;
using MutSpan = std::span<double>;

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, Vector data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  MutSpan row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  ConstSpan row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

  MutSpan flat() noexcept { return data_; }
  ConstSpan flat() const noexcept { return data_; }
  const double* data() const noexcept { return data_.data(); }
  double* data() noexcept { return data_.data(); }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kProbabilityFloor = 1e-12;

double dot(ConstSpan a, ConstSpan b);
double norm2(ConstSpan v);

/// y += alpha * x
void axpy(MutSpan y, double alpha, ConstSpan x);

/// A x
Vector matvec(const Matrix& a, ConstSpan x);

/// Throws ZeroNorm when the norm is at or below 1e-12.
Vector l2_normalize(ConstSpan v);

/// (u.v) / (|u| |v|). Throws DimMismatch or ZeroNorm.
double cosine_similarity(ConstSpan u, ConstSpan v);

/// Temperature-scaled softmax, computed with max subtraction.
Vector softmax(ConstSpan logits, double temperature = 1.0);

/// -log(p[label]) with p[label] clamped at 1e-12.
double cross_entropy(ConstSpan probabilities, std::size_t label);

double logsumexp(ConstSpan v);

/// Index of the largest entry, lowest index on ties.
std::size_t argmax(ConstSpan v);

bool all_finite(ConstSpan v) noexcept;

void require_same_dim(std::size_t a, std::size_t b, const char* what);

}  // namespace sono
