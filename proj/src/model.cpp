#include "sono/model.hpp"

#include <string>

#include "sono/adjoint.hpp"

namespace sono {

void SonoModel::validate() const {
  const std::size_t d = dim();
  if (classifier.rows() == 0 || d == 0) throw Error(ErrorCode::ShapeMismatch, "empty classifier");
  if (field.input_dim() != 2 * d + 1 || field.output_dim() != d) {
    throw Error(ErrorCode::ShapeMismatch, "field network does not match feature dimension");
  }
  if (velocity.input_dim() != d || velocity.output_dim() != d) {
    throw Error(ErrorCode::ShapeMismatch, "velocity network does not match feature dimension");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error(ErrorCode::InvalidArgument, "eta must be in [0, 1]");
  if (!class_names.empty() && class_names.size() != classifier.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "class name count differs from classifier rows");
  }
  solver.validate();
}

Matrix init_classifier(const std::vector<Vector>& text_embeddings) {
  if (text_embeddings.size() < 2) {
    throw Error(ErrorCode::TooFewClasses, "a classifier needs at least two classes");
  }
  const std::size_t d = text_embeddings.front().size();
  Matrix w(text_embeddings.size(), d);
  for (std::size_t k = 0; k < text_embeddings.size(); ++k) {
    require_same_dim(text_embeddings[k].size(), d, "init_classifier");
    std::copy(text_embeddings[k].begin(), text_embeddings[k].end(), w.row(k).begin());
  }
  return w;
}

RefinerInit init_refiner(std::size_t dim, std::size_t hidden, Philox& rng) {
  RefinerInit init{Mlp::glorot(field_widths(dim, hidden), rng),
                   Mlp::glorot(velocity_widths(dim, hidden), rng)};
  for (Mlp* net : {&init.field, &init.velocity}) {
    auto& out = net->layers().back();
    std::fill(out.weight.flat().begin(), out.weight.flat().end(), 0.0);
    std::fill(out.bias.begin(), out.bias.end(), 0.0);
  }
  return init;
}

Vector refine_feature(const SonoModel& model, ConstSpan f) {
  const std::size_t d = model.dim();
  require_same_dim(f.size(), d, "refine_feature");
  Vector refined(f.begin(), f.end());
  if (model.eta != 0.0) {
    const Vector v0 = velocity_init(model.velocity, f);
    Vector z0(2 * d);
    std::copy(f.begin(), f.end(), z0.begin());
    std::copy(v0.begin(), v0.end(), z0.begin() + d);
    const SecondOrderDynamics dyn(model.field);
    const Vector z_end = integrate(dyn.as_rhs(), z0, model.solver);
    for (std::size_t i = 0; i < d; ++i) {
      refined[i] = f[i] + model.eta * (z_end[i] - f[i]);
    }
  }
  if (model.normalize_refined) refined = l2_normalize(refined);
  return refined;
}

Prediction predict(const SonoModel& model, ConstSpan f) {
  Prediction p;
  p.refined_feature = refine_feature(model, f);
  p.logits = matvec(model.classifier, p.refined_feature);
  p.label = argmax(p.logits);
  return p;
}

Vector zero_shot_predict(const std::vector<Vector>& text_embeddings, ConstSpan f,
                         double temperature) {
  if (!(temperature > 0.0)) {
    throw Error(ErrorCode::NonPositiveTemperature, "temperature must be positive");
  }
  Vector sims(text_embeddings.size());
  for (std::size_t k = 0; k < text_embeddings.size(); ++k) {
    sims[k] = cosine_similarity(text_embeddings[k], f);
  }
  return softmax(sims, temperature);
}

}  // namespace sono
