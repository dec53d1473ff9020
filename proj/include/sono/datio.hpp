#pragma once

/** \file datio.hpp
 *  \brief On-disk formats and the seeded synthetic task generator.
 *
 * Embedding file (little-endian):
 *   "SONOEMB1" | u32 count | u32 dim | u8 label_present
 *   | count*dim float32 row-major | [count int32 labels]
 *
 * Codebook: a JSON metadata document
 *   {"format": "sono-codebook", "classes": [{"name": ..., "prompts": [...]}, ...]}
 * plus an embedding file holding K*M rows in class-major order.
 *
 * Checkpoint (little-endian):
 *   "SONOCKP1" | u32 dim | u32 classes
 *   | u32 field_layers | field_layers x (u32 out, u32 in)
 *   | u32 velocity_layers | velocity_layers x (u32 out, u32 in)
 *   | f64 eta | u8 method | u32 steps | f64 t0 | f64 t_end | u8 normalize_refined
 *   | classes x (u32 byte_length, UTF-8 bytes)
 *   | field params, velocity params, classifier (K x d) as float64
 *
 * Every reader checks declared sizes against the file length before
 * allocating payload buffers.
 */

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sono/augment.hpp"
#include "sono/linalg.hpp"
#include "sono/model.hpp"

namespace sono {

struct EmbeddingSet {
  std::size_t dim = 0;
  std::vector<Vector> rows;
  /// Empty when the set is unlabeled.
  std::vector<std::int32_t> labels;

  std::size_t size() const noexcept { return rows.size(); }
  bool has_labels() const noexcept { return !labels.empty(); }
};

void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path);
EmbeddingSet read_embeddings(const std::filesystem::path& path);

void write_codebook(const PromptCodebook& codebook, const std::filesystem::path& meta_path,
                    const std::filesystem::path& vectors_path);
PromptCodebook read_codebook(const std::filesystem::path& meta_path,
                             const std::filesystem::path& vectors_path);

void write_checkpoint(const SonoModel& model, const std::filesystem::path& path);
SonoModel read_checkpoint(const std::filesystem::path& path);

/// In-memory forms of the binary layouts, used by the file functions.
std::vector<std::uint8_t> encode_embeddings(const EmbeddingSet& set);
EmbeddingSet decode_embeddings(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_checkpoint(const SonoModel& model);
SonoModel decode_checkpoint(const std::vector<std::uint8_t>& bytes);

/// Groups a labeled set by class; labels must lie in [0, class_count).
FewShotSet group_by_label(const EmbeddingSet& set, std::size_t class_count);
/// Flattens a few-shot set into a labeled embedding set, class-major.
EmbeddingSet flatten_shots(const FewShotSet& shots);
/// Draws n shots per class without replacement. Throws CountMismatch if a
/// class holds fewer than n features.
FewShotSet sample_shots(const FewShotSet& pool, std::size_t n, std::uint64_t seed);

struct SyntheticSpec {
  std::size_t classes = 5;
  std::size_t dim = 16;
  std::size_t train_per_class = 4;
  std::size_t test_per_class = 500;
  double sigma = 0.05;
  double min_angle_deg = 60.0;
  std::size_t prompts_per_class = 50;
  double prompt_sigma = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticData {
  FewShotSet train;
  EmbeddingSet test;
  PromptCodebook codebook;
  std::vector<Vector> text_init;
  std::vector<Vector> centers;
};

/// Class centers are unit vectors with pairwise angle at least min_angle_deg,
/// found by rejection sampling (Gram-Schmidt when the bound is exactly 90
/// degrees). Features are normalize(center + N(0, sigma^2 I)); prompts use
/// prompt_sigma; text-init vectors are the centers. All draws come from
/// Philox4x32-10 keyed by the seed with one stream per role.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace sono
