#pragma once

/** \file augment.hpp
 *  \brief Text-as-image augmentation over a per-class prompt codebook.
 *
 * For each class the N shot features are averaged into a prototype, the
 * class's M prompt embeddings are ranked by cosine similarity to it, and the
 * top L prompt embeddings join the N image features as extra training rows.
 */

#include <cstddef>
#include <string>
#include <vector>

#include "sono/linalg.hpp"

namespace sono {

inline constexpr double kUnitNormTolerance = 1e-6;

struct PromptCodebook {
  std::vector<std::string> class_names;
  /// prompts[k][m] is prompt m of class k; every class holds the same count.
  std::vector<std::vector<Vector>> prompts;
  /// Prompt strings, same shape as prompts. May be empty strings.
  std::vector<std::vector<std::string>> texts;

  std::size_t class_count() const noexcept { return prompts.size(); }
  std::size_t prompts_per_class() const noexcept { return prompts.empty() ? 0 : prompts[0].size(); }
  std::size_t dim() const noexcept;

  /// Throws CountMismatch, DimMismatch or NotNormalized.
  void validate() const;
};

struct FewShotSet {
  /// shots[k] holds the image features of class k.
  std::vector<std::vector<Vector>> shots;

  std::size_t class_count() const noexcept { return shots.size(); }
  std::size_t dim() const noexcept;
  std::size_t total() const noexcept;
};

struct FeatureOrigin {
  enum class Kind { Image, Prompt } kind = Kind::Image;
  /// Shot index for images, codebook prompt index for prompts.
  std::size_t index = 0;

  friend bool operator==(const FeatureOrigin&, const FeatureOrigin&) = default;
};

struct AugmentedFeature {
  Vector feature;
  FeatureOrigin origin;
  /// Cosine similarity to the class prototype for prompt rows, 0 for images.
  double similarity = 0.0;
};

struct AugmentedSet {
  std::vector<std::vector<AugmentedFeature>> classes;

  std::size_t class_count() const noexcept { return classes.size(); }
  std::size_t total() const noexcept;
  std::size_t dim() const noexcept;
  /// Drops prompt-origin rows.
  AugmentedSet images_only() const;
};

/// Mean of the shots, L2-normalized. Throws EmptyShotList, DimMismatch, ZeroNorm.
Vector class_prototype(const std::vector<Vector>& shots);

/// Indices of the L prompts most similar to the prototype, by descending
/// similarity, lower index first on ties. Throws LTooLarge.
std::vector<std::size_t> select_top_l(ConstSpan prototype, const std::vector<Vector>& prompts,
                                      std::size_t l);

/// Per class: the N images in order, then the L selected prompts in
/// descending-similarity order.
AugmentedSet build_augmented_set(const FewShotSet& shots, const PromptCodebook& codebook,
                                 std::size_t l);

}  // namespace sono
