#pragma once

/** \file train.hpp
 *  \brief Training loop, evaluation, and the ablation harness.
 *
 * Objective: mean softmax cross-entropy of W * refined(f) over the augmented
 * set. Gradients for the refiner come from the adjoint solve; the classifier
 * gradient is the closed-form linear one. Parameters are updated with AdamW
 * under a per-step cosine-annealed learning rate.
 */

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sono/augment.hpp"
#include "sono/datio.hpp"
#include "sono/linalg.hpp"
#include "sono/model.hpp"
#include "sono/odeint.hpp"

namespace sono {

struct AdamWParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-2;
};

struct OptimizerState {
  Vector m;
  Vector v;
  std::int64_t step = 0;

  explicit OptimizerState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// One decoupled-weight-decay Adam update, in place:
///   param -= lr * (m_hat / (sqrt(v_hat) + eps) + weight_decay * param)
void adamw_step(OptimizerState& state, MutSpan params, ConstSpan grads, double lr,
                const AdamWParams& hp);

/// 0.5 * lr_init * (1 + cos(pi * step / total_steps)), floored at 0.
double cosine_lr(std::int64_t step, std::int64_t total_steps, double lr_init);

struct TrainConfig {
  int epochs = 15;
  double lr_init = 1e-3;
  AdamWParams adamw;
  /// The whole augmented set is one batch whenever it has at most this many rows.
  std::size_t batch_size = 256;
  std::uint64_t seed = 0;
  std::size_t shots = 4;
  std::size_t augment = 10;
  double eta = 0.6;
  SolverConfig solver;
  std::size_t hidden = 256;
  bool normalize_refined = false;
  /// Train on prompt-origin rows of the augmented set.
  bool tia_on = true;
  /// Use the ODE refiner. Off means eta = 0 and frozen refiner parameters.
  bool snm_on = true;

  void validate() const;
};

struct EpochMetrics {
  int epoch = 0;
  double loss = 0.0;
  double accuracy = 0.0;
  double lr = 0.0;
  std::size_t samples = 0;
  double wall_time = 0.0;
};

struct EvalMetrics {
  double accuracy = 0.0;
  double loss = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
};

struct FitResult {
  SonoModel model;
  std::vector<EpochMetrics> history;
};

/// Loss and gradients for one labeled feature. Gradients are accumulated
/// (scaled by weight) into the three blocks; pass empty spans to skip the
/// refiner blocks. Returns the loss and whether the prediction was correct.
struct SampleResult {
  double loss = 0.0;
  bool correct = false;
};
SampleResult accumulate_sample_gradient(const SonoModel& model, ConstSpan f, std::size_t label,
                                        double weight, MutSpan grad_field, MutSpan grad_velocity,
                                        MutSpan grad_classifier);

/// Builds the initial model for a given configuration.
SonoModel initial_model(const std::vector<Vector>& text_init, const TrainConfig& config,
                        std::size_t dim);

FitResult fit(const AugmentedSet& train_set, const std::vector<Vector>& text_init,
              const TrainConfig& config);

/// Throws EmptyTestSet, DimMismatch, or CountMismatch (unlabeled).
EvalMetrics evaluate(const SonoModel& model, const EmbeddingSet& test_set);

/// One JSON object per line. Wall time is left out so runs with the same
/// seed produce identical text.
std::string metrics_jsonl(const std::vector<EpochMetrics>& history);

struct AblationRow {
  bool tia = false;
  bool snm = false;
  std::size_t shots = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
};

/// For each seed: draws the shots from the pool, augments, and trains the
/// four (tia, snm) combinations in the order full, snm-only, tia-only,
/// classifier-only.
std::vector<AblationRow> run_ablation(const FewShotSet& pool, const EmbeddingSet& test,
                                      const PromptCodebook& codebook,
                                      const std::vector<Vector>& text_init,
                                      const TrainConfig& base,
                                      const std::vector<std::uint64_t>& seeds);

struct EtaPoint {
  double eta = 0.0;
  double accuracy = 0.0;
};

struct EtaSweep {
  std::vector<EtaPoint> points;
  /// Accuracy of the classifier-only model trained on the same augmented set.
  double linear_probe_accuracy = 0.0;
  /// Largest |logit difference| on the test set between the eta = 0 model
  /// and the linear probe.
  double max_logit_gap_at_zero = 0.0;
};

EtaSweep sweep_eta(const FewShotSet& pool, const EmbeddingSet& test,
                   const PromptCodebook& codebook, const std::vector<Vector>& text_init,
                   const TrainConfig& base, const std::vector<double>& etas);

}  // namespace sono
