#include "sono/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sono/kernels.hpp"

namespace sono {

ErrorKind kind_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::NonPositiveTemperature:
    case ErrorCode::LTooLarge:
    case ErrorCode::StepOutOfRange:
    case ErrorCode::UnsupportedMethod:
    case ErrorCode::InsufficientHistory:
    case ErrorCode::TooFewClasses:
      return ErrorKind::Usage;
    case ErrorCode::NonFiniteState:
    case ErrorCode::NonFiniteLoss:
      return ErrorKind::Numerical;
    default:
      return ErrorKind::Data;
  }
}

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonPositiveTemperature: return "NonPositiveTemperature";
    case ErrorCode::EmptyShotList: return "EmptyShotList";
    case ErrorCode::LTooLarge: return "LTooLarge";
    case ErrorCode::TooFewClasses: return "TooFewClasses";
    case ErrorCode::StepOutOfRange: return "StepOutOfRange";
    case ErrorCode::EmptyTestSet: return "EmptyTestSet";
    case ErrorCode::UnsupportedMethod: return "UnsupportedMethod";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::AngleInfeasible: return "AngleInfeasible";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
  }
  return "Unknown";
}

Matrix::Matrix(std::size_t rows, std::size_t cols, Vector data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::ShapeMismatch, "matrix data has " + std::to_string(data_.size()) +
                                              " entries, expected " +
                                              std::to_string(rows_ * cols_));
  }
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::DimMismatch,
                std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

double dot(ConstSpan a, ConstSpan b) {
  require_same_dim(a.size(), b.size(), "dot");
  return kernels::active().dot(a.data(), b.data(), a.size());
}

double norm2(ConstSpan v) { return std::sqrt(kernels::active().dot(v.data(), v.data(), v.size())); }

void axpy(MutSpan y, double alpha, ConstSpan x) {
  require_same_dim(y.size(), x.size(), "axpy");
  kernels::active().axpy(y.data(), alpha, x.data(), x.size());
}

Vector matvec(const Matrix& a, ConstSpan x) {
  require_same_dim(a.cols(), x.size(), "matvec");
  Vector y(a.rows());
  kernels::active().gemv(a.data(), a.rows(), a.cols(), x.data(), nullptr, y.data());
  return y;
}

Vector l2_normalize(ConstSpan v) {
  const double n = norm2(v);
  if (!(n > kNormTolerance)) throw Error(ErrorCode::ZeroNorm, "cannot normalize a zero vector");
  Vector out(v.begin(), v.end());
  for (double& x : out) x /= n;
  return out;
}

double cosine_similarity(ConstSpan u, ConstSpan v) {
  require_same_dim(u.size(), v.size(), "cosine_similarity");
  const double nu = norm2(u);
  const double nv = norm2(v);
  if (!(nu > kNormTolerance) || !(nv > kNormTolerance)) {
    throw Error(ErrorCode::ZeroNorm, "cosine similarity of a zero vector");
  }
  const double s = dot(u, v) / (nu * nv);
  return std::clamp(s, -1.0, 1.0);
}

Vector softmax(ConstSpan logits, double temperature) {
  if (!(temperature > 0.0)) {
    throw Error(ErrorCode::NonPositiveTemperature, "temperature must be positive");
  }
  Vector out(logits.size());
  if (logits.empty()) return out;
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp((logits[i] - m) / temperature);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
  return out;
}

double cross_entropy(ConstSpan probabilities, std::size_t label) {
  if (label >= probabilities.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "label " + std::to_string(label) + " of " +
                                                std::to_string(probabilities.size()));
  }
  return -std::log(std::max(probabilities[label], kProbabilityFloor));
}

double logsumexp(ConstSpan v) {
  if (v.empty()) return -INFINITY;
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

std::size_t argmax(ConstSpan v) {
  if (v.empty()) throw Error(ErrorCode::IndexOutOfRange, "argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

bool all_finite(ConstSpan v) noexcept {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace sono
