#include "sono/train.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <json.hpp>

#include "sono/adjoint.hpp"
#include "sono/kernels.hpp"
#include "sono/philox.hpp"

namespace sono {

void adamw_step(OptimizerState& state, MutSpan params, ConstSpan grads, double lr,
                const AdamWParams& hp) {
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw Error(ErrorCode::ShapeMismatch, "optimizer state, parameters and gradients differ in size");
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = hp.beta1 * state.m[i] + (1.0 - hp.beta1) * g;
    state.v[i] = hp.beta2 * state.v[i] + (1.0 - hp.beta2) * g * g;
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= lr * (m_hat / (std::sqrt(v_hat) + hp.eps) + hp.weight_decay * params[i]);
  }
}

double cosine_lr(std::int64_t step, std::int64_t total_steps, double lr_init) {
  if (total_steps <= 0 || step < 0 || step > total_steps) {
    throw Error(ErrorCode::StepOutOfRange, "step " + std::to_string(step) + " outside [0, " +
                                               std::to_string(total_steps) + "]");
  }
  const double frac = static_cast<double>(step) / static_cast<double>(total_steps);
  return std::max(0.0, 0.5 * lr_init * (1.0 + std::cos(std::numbers::pi * frac)));
}

void TrainConfig::validate() const {
  if (epochs < 1) throw Error(ErrorCode::InvalidArgument, "epochs must be positive");
  if (!(lr_init >= 0.0)) throw Error(ErrorCode::InvalidArgument, "learning rate must be >= 0");
  if (!(adamw.beta1 > 0.0 && adamw.beta1 < 1.0 && adamw.beta2 > 0.0 && adamw.beta2 < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "betas must lie in (0, 1)");
  }
  if (!(adamw.eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  if (!(adamw.weight_decay >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "weight decay must be nonnegative");
  }
  if (batch_size < 1) throw Error(ErrorCode::InvalidArgument, "batch size must be positive");
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error(ErrorCode::InvalidArgument, "eta must be in [0, 1]");
  if (hidden < 1) throw Error(ErrorCode::InvalidArgument, "hidden width must be positive");
  solver.validate();
}

SampleResult accumulate_sample_gradient(const SonoModel& model, ConstSpan f, std::size_t label,
                                        double weight, MutSpan grad_field, MutSpan grad_velocity,
                                        MutSpan grad_classifier) {
  const std::size_t d = model.dim();
  const std::size_t k = model.class_count();
  require_same_dim(f.size(), d, "training feature");
  if (label >= k) throw Error(ErrorCode::IndexOutOfRange, "label out of range");
  const auto& kern = kernels::active();
  const bool run_ode = model.eta != 0.0;

  MlpTape velocity_tape;
  Vector z_end;
  Vector raw(f.begin(), f.end());
  std::unique_ptr<SecondOrderDynamics> dyn;
  if (run_ode) {
    const Vector v0 = mlp_forward(model.velocity, f, &velocity_tape);
    Vector z0(2 * d);
    std::copy(f.begin(), f.end(), z0.begin());
    std::copy(v0.begin(), v0.end(), z0.begin() + d);
    dyn = std::make_unique<SecondOrderDynamics>(model.field);
    z_end = integrate(dyn->as_rhs(), z0, model.solver);
    for (std::size_t i = 0; i < d; ++i) raw[i] = f[i] + model.eta * (z_end[i] - f[i]);
  }
  const double raw_norm = model.normalize_refined ? norm2(raw) : 1.0;
  if (model.normalize_refined && !(raw_norm > kNormTolerance)) {
    throw Error(ErrorCode::NonFiniteLoss, "refined feature collapsed to zero");
  }
  Vector refined = raw;
  if (model.normalize_refined) {
    for (double& x : refined) x /= raw_norm;
  }

  const Vector logits = matvec(model.classifier, refined);
  const Vector p = softmax(logits);
  SampleResult result;
  result.loss = cross_entropy(p, label);
  result.correct = argmax(logits) == label;
  if (!std::isfinite(result.loss)) {
    throw Error(ErrorCode::NonFiniteLoss, "non-finite loss for a sample of class " +
                                              std::to_string(label));
  }

  Vector dlogits = p;
  dlogits[label] -= 1.0;
  if (!grad_classifier.empty()) {
    kern.ger_acc(grad_classifier.data(), k, d, weight, dlogits.data(), refined.data());
  }
  if (!run_ode || (grad_field.empty() && grad_velocity.empty())) return result;

  Vector drefined(d, 0.0);
  kern.gemv_t_acc(model.classifier.data(), k, d, dlogits.data(), drefined.data());
  if (model.normalize_refined) {
    // d(r/|r|)/dr = (I - u u^T) / |r|
    const double proj = dot(refined, drefined);
    for (std::size_t i = 0; i < d; ++i) drefined[i] = (drefined[i] - refined[i] * proj) / raw_norm;
  }
  Vector cot(2 * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) cot[i] = model.eta * drefined[i];
  const GradientReport rep = grad_adjoint_from_end(*dyn, z_end, cot, model.solver);
  if (!grad_field.empty()) kern.axpy(grad_field.data(), weight, rep.grad_params.data(), grad_field.size());
  if (!grad_velocity.empty()) {
    mlp_backward(model.velocity, velocity_tape, ConstSpan(rep.grad_z0).subspan(d, d), {},
                 grad_velocity, weight);
  }
  return result;
}

SonoModel initial_model(const std::vector<Vector>& text_init, const TrainConfig& config,
                        std::size_t dim) {
  SonoModel model;
  model.classifier = init_classifier(text_init);
  require_same_dim(model.classifier.cols(), dim, "text-init vs feature dimension");
  Philox rng(config.seed, 0x1417);
  RefinerInit refiner = init_refiner(dim, config.hidden, rng);
  model.field = std::move(refiner.field);
  model.velocity = std::move(refiner.velocity);
  model.eta = config.snm_on ? config.eta : 0.0;
  model.solver = config.solver;
  model.normalize_refined = config.normalize_refined;
  for (std::size_t k = 0; k < text_init.size(); ++k) {
    model.class_names.push_back("class_" + std::to_string(k));
  }
  return model;
}

FitResult fit(const AugmentedSet& train_set, const std::vector<Vector>& text_init,
              const TrainConfig& config) {
  config.validate();
  if (train_set.class_count() != text_init.size()) {
    throw Error(ErrorCode::DimMismatch, "training set has " +
                                            std::to_string(train_set.class_count()) +
                                            " classes, text-init has " +
                                            std::to_string(text_init.size()));
  }
  const AugmentedSet used = config.tia_on ? train_set : train_set.images_only();
  std::vector<const Vector*> rows;
  std::vector<std::size_t> labels;
  for (std::size_t k = 0; k < used.class_count(); ++k) {
    for (const auto& f : used.classes[k]) {
      rows.push_back(&f.feature);
      labels.push_back(k);
    }
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyShotList, "no training features");
  const std::size_t d = rows.front()->size();
  for (const Vector* r : rows) require_same_dim(r->size(), d, "training feature");

  FitResult out;
  out.model = initial_model(text_init, config, d);
  SonoModel& model = out.model;

  const std::size_t n = rows.size();
  const std::size_t batch = std::min(config.batch_size, n);
  const std::size_t batches_per_epoch = (n + batch - 1) / batch;
  const std::int64_t total_steps = static_cast<std::int64_t>(config.epochs) *
                                   static_cast<std::int64_t>(batches_per_epoch);

  const bool train_refiner = config.snm_on;
  Vector field_params = model.field.flatten();
  Vector velocity_params = model.velocity.flatten();
  OptimizerState field_state(train_refiner ? field_params.size() : 0);
  OptimizerState velocity_state(train_refiner ? velocity_params.size() : 0);
  OptimizerState classifier_state(model.classifier.size());
  Vector grad_field(train_refiner ? field_params.size() : 0);
  Vector grad_velocity(train_refiner ? velocity_params.size() : 0);
  Vector grad_classifier(model.classifier.size());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::int64_t step = 0;
  const auto start = std::chrono::steady_clock::now();
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (batches_per_epoch > 1) {
      Philox shuffle(config.seed, 0x5000 + static_cast<std::uint64_t>(epoch));
      for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[static_cast<std::size_t>(shuffle.below(i))]);
      }
    }
    double loss_sum = 0.0;
    std::size_t correct = 0;
    double lr = 0.0;
    for (std::size_t b = 0; b < batches_per_epoch; ++b) {
      const std::size_t lo = b * batch;
      const std::size_t hi = std::min(n, lo + batch);
      const double weight = 1.0 / static_cast<double>(hi - lo);
      std::fill(grad_field.begin(), grad_field.end(), 0.0);
      std::fill(grad_velocity.begin(), grad_velocity.end(), 0.0);
      std::fill(grad_classifier.begin(), grad_classifier.end(), 0.0);
      for (std::size_t i = lo; i < hi; ++i) {
        const std::size_t idx = order[i];
        SampleResult r;
        try {
          r = accumulate_sample_gradient(model, *rows[idx], labels[idx], weight, grad_field,
                                         grad_velocity, grad_classifier);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::Numerical) throw;
          throw Error(ErrorCode::NonFiniteLoss, "epoch " + std::to_string(epoch + 1) + ", step " +
                                                    std::to_string(step) + ", sample " +
                                                    std::to_string(idx) + ": " + e.what());
        }
        loss_sum += r.loss;
        correct += r.correct ? 1 : 0;
      }
      lr = cosine_lr(step, total_steps, config.lr_init);
      adamw_step(classifier_state, model.classifier.flat(), grad_classifier, lr, config.adamw);
      if (train_refiner) {
        adamw_step(field_state, field_params, grad_field, lr, config.adamw);
        adamw_step(velocity_state, velocity_params, grad_velocity, lr, config.adamw);
        model.field.assign(field_params);
        model.velocity.assign(velocity_params);
      }
      ++step;
    }
    EpochMetrics m;
    m.epoch = epoch + 1;
    m.loss = loss_sum / static_cast<double>(n);
    m.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    m.lr = lr;
    m.samples = n;
    m.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!std::isfinite(m.loss)) {
      throw Error(ErrorCode::NonFiniteLoss, "epoch " + std::to_string(m.epoch) + " mean loss");
    }
    out.history.push_back(m);
  }
  return out;
}

EvalMetrics evaluate(const SonoModel& model, const EmbeddingSet& test_set) {
  if (test_set.rows.empty()) throw Error(ErrorCode::EmptyTestSet, "no test rows");
  if (!test_set.has_labels()) throw Error(ErrorCode::CountMismatch, "test set has no labels");
  require_same_dim(test_set.dim, model.dim(), "test set vs model dimension");
  EvalMetrics m;
  m.total = test_set.size();
  double loss = 0.0;
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    const auto label = test_set.labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= model.class_count()) {
      throw Error(ErrorCode::IndexOutOfRange, "test label " + std::to_string(label));
    }
    const Prediction p = predict(model, test_set.rows[i]);
    if (p.label == static_cast<std::size_t>(label)) ++m.correct;
    loss += cross_entropy(softmax(p.logits), static_cast<std::size_t>(label));
  }
  m.accuracy = static_cast<double>(m.correct) / static_cast<double>(m.total);
  m.loss = loss / static_cast<double>(m.total);
  return m;
}

std::string metrics_jsonl(const std::vector<EpochMetrics>& history) {
  std::string out;
  for (const auto& m : history) {
    nlohmann::json j;
    j["epoch"] = m.epoch;
    j["loss"] = m.loss;
    j["accuracy"] = m.accuracy;
    j["lr"] = m.lr;
    j["samples"] = m.samples;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<AblationRow> run_ablation(const FewShotSet& pool, const EmbeddingSet& test,
                                      const PromptCodebook& codebook,
                                      const std::vector<Vector>& text_init,
                                      const TrainConfig& base,
                                      const std::vector<std::uint64_t>& seeds) {
  std::vector<AblationRow> rows;
  constexpr std::pair<bool, bool> kConfigs[] = {{true, true}, {false, true}, {true, false},
                                                {false, false}};
  for (std::uint64_t seed : seeds) {
    const FewShotSet shots = sample_shots(pool, base.shots, seed);
    const AugmentedSet augmented = build_augmented_set(shots, codebook, base.augment);
    for (const auto& [tia, snm] : kConfigs) {
      TrainConfig cfg = base;
      cfg.seed = seed;
      cfg.tia_on = tia;
      cfg.snm_on = snm;
      const FitResult fr = fit(augmented, text_init, cfg);
      rows.push_back({tia, snm, base.shots, seed, evaluate(fr.model, test).accuracy});
    }
  }
  return rows;
}

EtaSweep sweep_eta(const FewShotSet& pool, const EmbeddingSet& test,
                   const PromptCodebook& codebook, const std::vector<Vector>& text_init,
                   const TrainConfig& base, const std::vector<double>& etas) {
  const FewShotSet shots = sample_shots(pool, base.shots, base.seed);
  const AugmentedSet augmented = build_augmented_set(shots, codebook, base.augment);
  EtaSweep sweep;
  for (double eta : etas) {
    TrainConfig cfg = base;
    cfg.eta = eta;
    cfg.snm_on = true;
    const FitResult fr = fit(augmented, text_init, cfg);
    sweep.points.push_back({eta, evaluate(fr.model, test).accuracy});
  }

  TrainConfig probe_cfg = base;
  probe_cfg.snm_on = false;
  const SonoModel probe = fit(augmented, text_init, probe_cfg).model;
  sweep.linear_probe_accuracy = evaluate(probe, test).accuracy;

  TrainConfig zero_cfg = base;
  zero_cfg.snm_on = true;
  zero_cfg.eta = 0.0;
  const SonoModel at_zero = fit(augmented, text_init, zero_cfg).model;
  for (const Vector& row : test.rows) {
    const Vector a = predict(at_zero, row).logits;
    const Vector b = matvec(probe.classifier, row);
    for (std::size_t k = 0; k < a.size(); ++k) {
      sweep.max_logit_gap_at_zero = std::max(sweep.max_logit_gap_at_zero, std::abs(a[k] - b[k]));
    }
  }
  return sweep;
}

}  // namespace sono
