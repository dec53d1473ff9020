#pragma once

/** \file model.hpp
 *  \brief Second-order ODE feature refiner with a text-initialized linear classifier.
 *
 * A feature f is lifted to z(t0) = [f, g(f)], integrated through
 * x'' = S(x, x', t) to t_end, and blended with the input:
 *     refined = eta * x(t_end) + (1 - eta) * f
 * Logits are plain dot products W * refined (no temperature).
 */

#include <cstddef>
#include <string>
#include <vector>

#include "sono/linalg.hpp"
#include "sono/odeint.hpp"
#include "sono/philox.hpp"
#include "sono/vectorfield.hpp"

namespace sono {

struct SonoModel {
  Mlp field;     // S: [2d+1] -> d
  Mlp velocity;  // g: d -> d
  Matrix classifier;  // K x d
  double eta = 0.6;
  SolverConfig solver;
  std::vector<std::string> class_names;
  /// Re-normalize the refined feature before the classifier.
  bool normalize_refined = false;

  std::size_t dim() const noexcept { return classifier.cols(); }
  std::size_t class_count() const noexcept { return classifier.rows(); }

  /// Throws ShapeMismatch or InvalidArgument.
  void validate() const;
};

struct Prediction {
  Vector logits;
  std::size_t label = 0;
  Vector refined_feature;
};

/// Rows of W are copies of the class text embeddings. Throws TooFewClasses, DimMismatch.
Matrix init_classifier(const std::vector<Vector>& text_embeddings);

/// Refiner networks for feature dimension d: Glorot hidden layers and a
/// zero output layer, so that an untrained refiner is the identity map.
struct RefinerInit {
  Mlp field;
  Mlp velocity;
};
RefinerInit init_refiner(std::size_t dim, std::size_t hidden, Philox& rng);

Vector refine_feature(const SonoModel& model, ConstSpan f);

Prediction predict(const SonoModel& model, ConstSpan f);

/// softmax_k(cos(text_k, f) / temperature).
Vector zero_shot_predict(const std::vector<Vector>& text_embeddings, ConstSpan f,
                         double temperature);

}  // namespace sono
