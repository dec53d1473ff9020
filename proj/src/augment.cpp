#include "sono/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sono {

std::size_t PromptCodebook::dim() const noexcept {
  for (const auto& cls : prompts) {
    if (!cls.empty()) return cls.front().size();
  }
  return 0;
}

void PromptCodebook::validate() const {
  if (prompts.empty()) throw Error(ErrorCode::CountMismatch, "codebook has no classes");
  if (!class_names.empty() && class_names.size() != prompts.size()) {
    throw Error(ErrorCode::CountMismatch, "class name count differs from prompt class count");
  }
  const std::size_t m = prompts_per_class();
  const std::size_t d = dim();
  if (m == 0) throw Error(ErrorCode::CountMismatch, "codebook classes hold no prompts");
  for (std::size_t k = 0; k < prompts.size(); ++k) {
    if (prompts[k].size() != m) {
      throw Error(ErrorCode::CountMismatch, "class " + std::to_string(k) + " has " +
                                                std::to_string(prompts[k].size()) +
                                                " prompts, expected " + std::to_string(m));
    }
    for (std::size_t j = 0; j < m; ++j) {
      const Vector& p = prompts[k][j];
      if (p.size() != d) throw Error(ErrorCode::DimMismatch, "prompt dimension differs");
      if (std::abs(norm2(p) - 1.0) > kUnitNormTolerance) {
        throw Error(ErrorCode::NotNormalized, "prompt " + std::to_string(j) + " of class " +
                                                  std::to_string(k) + " is not unit length");
      }
    }
  }
}

std::size_t FewShotSet::dim() const noexcept {
  for (const auto& cls : shots) {
    if (!cls.empty()) return cls.front().size();
  }
  return 0;
}

std::size_t FewShotSet::total() const noexcept {
  std::size_t n = 0;
  for (const auto& cls : shots) n += cls.size();
  return n;
}

std::size_t AugmentedSet::total() const noexcept {
  std::size_t n = 0;
  for (const auto& cls : classes) n += cls.size();
  return n;
}

std::size_t AugmentedSet::dim() const noexcept {
  for (const auto& cls : classes) {
    if (!cls.empty()) return cls.front().feature.size();
  }
  return 0;
}

AugmentedSet AugmentedSet::images_only() const {
  AugmentedSet out;
  out.classes.resize(classes.size());
  for (std::size_t k = 0; k < classes.size(); ++k) {
    for (const auto& f : classes[k]) {
      if (f.origin.kind == FeatureOrigin::Kind::Image) out.classes[k].push_back(f);
    }
  }
  return out;
}

Vector class_prototype(const std::vector<Vector>& shots) {
  if (shots.empty()) throw Error(ErrorCode::EmptyShotList, "prototype of an empty shot list");
  const std::size_t d = shots.front().size();
  Vector mean(d, 0.0);
  for (const Vector& s : shots) {
    require_same_dim(s.size(), d, "class_prototype");
    for (std::size_t i = 0; i < d; ++i) mean[i] += s[i];
  }
  for (double& x : mean) x /= static_cast<double>(shots.size());
  return l2_normalize(mean);
}

std::vector<std::size_t> select_top_l(ConstSpan prototype, const std::vector<Vector>& prompts,
                                      std::size_t l) {
  if (l > prompts.size()) {
    throw Error(ErrorCode::LTooLarge, "requested " + std::to_string(l) + " prompts out of " +
                                          std::to_string(prompts.size()));
  }
  std::vector<double> sims(prompts.size());
  for (std::size_t j = 0; j < prompts.size(); ++j) sims[j] = cosine_similarity(prototype, prompts[j]);
  std::vector<std::size_t> order(prompts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(l), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return sims[a] > sims[b] || (sims[a] == sims[b] && a < b);
                    });
  order.resize(l);
  return order;
}

AugmentedSet build_augmented_set(const FewShotSet& shots, const PromptCodebook& codebook,
                                 std::size_t l) {
  if (l > 0) {
    if (codebook.class_count() != shots.class_count()) {
      throw Error(ErrorCode::DimMismatch, "codebook has " +
                                              std::to_string(codebook.class_count()) +
                                              " classes, shots have " +
                                              std::to_string(shots.class_count()));
    }
    require_same_dim(codebook.dim(), shots.dim(), "codebook vs shot dimension");
  }
  AugmentedSet out;
  out.classes.resize(shots.class_count());
  for (std::size_t k = 0; k < shots.class_count(); ++k) {
    auto& dst = out.classes[k];
    const auto& cls = shots.shots[k];
    for (std::size_t i = 0; i < cls.size(); ++i) {
      dst.push_back({cls[i], {FeatureOrigin::Kind::Image, i}, 0.0});
    }
    if (l == 0) continue;
    const Vector proto = class_prototype(cls);
    const auto& prompts = codebook.prompts[k];
    for (std::size_t j : select_top_l(proto, prompts, l)) {
      dst.push_back({prompts[j], {FeatureOrigin::Kind::Prompt, j},
                     cosine_similarity(proto, prompts[j])});
    }
  }
  return out;
}

}  // namespace sono
