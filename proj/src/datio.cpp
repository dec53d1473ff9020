#include "sono/datio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <string_view>

#include <json.hpp>

#include "sono/philox.hpp"

namespace sono {
namespace {

constexpr std::string_view kEmbeddingMagic = "SONOEMB1";
constexpr std::string_view kCheckpointMagic = "SONOCKP1";
constexpr std::size_t kEmbeddingHeaderBytes = 8 + 4 + 4 + 1;

class ByteWriter {
 public:
  void magic(std::string_view m) { bytes_.insert(bytes_.end(), m.begin(), m.end()); }
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  ByteReader(const std::vector<std::uint8_t>& bytes, ErrorCode short_error)
      : bytes_(bytes), short_error_(short_error) {}

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw Error(short_error_, std::string("file ends inside ") + what);
    }
  }
  bool magic(std::string_view m) {
    if (remaining() < m.size()) return false;
    const bool ok = std::equal(m.begin(), m.end(), bytes_.begin() + static_cast<long>(pos_));
    pos_ += m.size();
    return ok;
  }
  std::uint8_t u8() {
    need(1, "u8");
    return bytes_[pos_++];
  }
  std::uint32_t u32() {
    need(4, "u32");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8, "u64");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n, "string");
    std::string s(bytes_.begin() + static_cast<long>(pos_),
                  bytes_.begin() + static_cast<long>(pos_ + n));
    pos_ += n;
    return s;
  }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
  ErrorCode short_error_;
};

}  // namespace

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  std::vector<std::uint8_t> bytes(size);
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), static_cast<long>(size))) {
    throw Error(ErrorCode::IoError, "cannot read " + path.string());
  }
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<long>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

std::vector<std::uint8_t> encode_embeddings(const EmbeddingSet& set) {
  if (set.rows.empty() || set.dim == 0) {
    throw Error(ErrorCode::CountMismatch, "embedding sets need at least one row and column");
  }
  if (set.has_labels() && set.labels.size() != set.rows.size()) {
    throw Error(ErrorCode::CountMismatch, "label count differs from row count");
  }
  ByteWriter w;
  w.magic(kEmbeddingMagic);
  w.u32(static_cast<std::uint32_t>(set.rows.size()));
  w.u32(static_cast<std::uint32_t>(set.dim));
  w.u8(set.has_labels() ? 1 : 0);
  for (const Vector& row : set.rows) {
    require_same_dim(row.size(), set.dim, "embedding row");
    for (double x : row) w.f32(static_cast<float>(x));
  }
  for (std::int32_t label : set.labels) w.i32(label);
  return w.take();
}

EmbeddingSet decode_embeddings(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes, ErrorCode::TruncatedFile);
  if (!r.magic(kEmbeddingMagic)) throw Error(ErrorCode::BadMagic, "not an embedding file");
  const std::uint64_t count = r.u32();
  const std::uint64_t dim = r.u32();
  const std::uint8_t labeled = r.u8();
  if (count == 0 || dim == 0) throw Error(ErrorCode::CountMismatch, "count and dim must be >= 1");
  if (labeled > 1) throw Error(ErrorCode::BadMagic, "label flag must be 0 or 1");
  const std::uint64_t expected =
      kEmbeddingHeaderBytes + count * dim * 4 + (labeled ? count * 4 : 0);
  if (bytes.size() < expected) {
    throw Error(ErrorCode::TruncatedFile, "header declares " + std::to_string(expected) +
                                              " bytes, file has " + std::to_string(bytes.size()));
  }
  if (bytes.size() > expected) {
    throw Error(ErrorCode::CountMismatch, "trailing bytes after declared payload");
  }
  EmbeddingSet set;
  set.dim = dim;
  set.rows.resize(count);
  for (auto& row : set.rows) {
    row.resize(dim);
    for (double& x : row) {
      const float v = r.f32();
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteEntry, "non-finite embedding entry");
      x = v;
    }
  }
  if (labeled) {
    set.labels.resize(count);
    for (auto& label : set.labels) label = r.i32();
  }
  return set;
}

void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path) {
  write_file_bytes(path, encode_embeddings(set));
}

EmbeddingSet read_embeddings(const std::filesystem::path& path) {
  return decode_embeddings(read_file_bytes(path));
}

void write_codebook(const PromptCodebook& codebook, const std::filesystem::path& meta_path,
                    const std::filesystem::path& vectors_path) {
  codebook.validate();
  nlohmann::json meta;
  meta["format"] = "sono-codebook";
  meta["classes"] = nlohmann::json::array();
  EmbeddingSet vectors;
  vectors.dim = codebook.dim();
  for (std::size_t k = 0; k < codebook.class_count(); ++k) {
    nlohmann::json cls;
    cls["name"] = k < codebook.class_names.size() ? codebook.class_names[k]
                                                  : "class_" + std::to_string(k);
    auto prompts = nlohmann::json::array();
    for (std::size_t m = 0; m < codebook.prompts[k].size(); ++m) {
      const bool has_text = k < codebook.texts.size() && m < codebook.texts[k].size();
      prompts.push_back(has_text ? codebook.texts[k][m] : std::string());
      vectors.rows.push_back(codebook.prompts[k][m]);
      vectors.labels.push_back(static_cast<std::int32_t>(k));
    }
    cls["prompts"] = std::move(prompts);
    meta["classes"].push_back(std::move(cls));
  }
  const std::string text = meta.dump(2) + "\n";
  write_file_bytes(meta_path, std::vector<std::uint8_t>(text.begin(), text.end()));
  write_embeddings(vectors, vectors_path);
}

PromptCodebook read_codebook(const std::filesystem::path& meta_path,
                             const std::filesystem::path& vectors_path) {
  const auto meta_bytes = read_file_bytes(meta_path);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_bytes.begin(), meta_bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadMagic, "codebook metadata is not valid JSON: " + std::string(e.what()));
  }
  if (!meta.is_object() || meta.value("format", "") != "sono-codebook" ||
      !meta.contains("classes") || !meta["classes"].is_array()) {
    throw Error(ErrorCode::BadMagic, "codebook metadata lacks format tag or class list");
  }
  PromptCodebook cb;
  for (const auto& cls : meta["classes"]) {
    if (!cls.contains("name") || !cls.contains("prompts") || !cls["prompts"].is_array()) {
      throw Error(ErrorCode::CountMismatch, "codebook class entry needs name and prompts");
    }
    cb.class_names.push_back(cls["name"].get<std::string>());
    cb.texts.push_back(cls["prompts"].get<std::vector<std::string>>());
  }
  if (cb.texts.empty()) throw Error(ErrorCode::CountMismatch, "codebook lists no classes");
  const std::size_t m = cb.texts.front().size();
  for (std::size_t k = 0; k < cb.texts.size(); ++k) {
    if (cb.texts[k].size() != m || m == 0) {
      throw Error(ErrorCode::CountMismatch, "class '" + cb.class_names[k] + "' lists " +
                                                std::to_string(cb.texts[k].size()) +
                                                " prompts, expected " + std::to_string(m));
    }
  }
  const EmbeddingSet vectors = read_embeddings(vectors_path);
  if (vectors.size() != cb.texts.size() * m) {
    throw Error(ErrorCode::CountMismatch, "vector file holds " + std::to_string(vectors.size()) +
                                              " rows, metadata implies " +
                                              std::to_string(cb.texts.size() * m));
  }
  cb.prompts.resize(cb.texts.size());
  for (std::size_t k = 0; k < cb.texts.size(); ++k) {
    cb.prompts[k].assign(vectors.rows.begin() + static_cast<long>(k * m),
                         vectors.rows.begin() + static_cast<long>((k + 1) * m));
  }
  cb.validate();
  return cb;
}

namespace {

void write_shapes(ByteWriter& w, const Mlp& net) {
  w.u32(static_cast<std::uint32_t>(net.layer_count()));
  for (const auto& layer : net.layers()) {
    w.u32(static_cast<std::uint32_t>(layer.weight.rows()));
    w.u32(static_cast<std::uint32_t>(layer.weight.cols()));
  }
}

Mlp read_shapes(ByteReader& r, std::uint64_t& param_total) {
  const std::uint32_t count = r.u32();
  if (count == 0) throw Error(ErrorCode::ShapeMismatch, "network with no layers");
  r.need(static_cast<std::uint64_t>(count) * 8, "layer shapes");
  std::vector<std::size_t> widths;
  for (std::uint32_t l = 0; l < count; ++l) {
    const std::uint32_t out = r.u32();
    const std::uint32_t in = r.u32();
    if (out == 0 || in == 0) throw Error(ErrorCode::ShapeMismatch, "zero-width layer");
    if (l == 0) widths.push_back(in);
    if (widths.back() != in) throw Error(ErrorCode::ShapeMismatch, "layers do not compose");
    widths.push_back(out);
    param_total += static_cast<std::uint64_t>(out) * in + out;
  }
  // The parameter block must fit in what remains before any allocation.
  if (param_total * 8 > r.remaining()) {
    throw Error(ErrorCode::ShapeMismatch, "declared parameters exceed file size");
  }
  return Mlp::zeros(widths);
}

void read_params(ByteReader& r, Mlp& net) {
  Vector flat(net.param_count());
  for (double& x : flat) x = r.f64();
  net.assign(flat);
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const SonoModel& model) {
  model.validate();
  ByteWriter w;
  w.magic(kCheckpointMagic);
  w.u32(static_cast<std::uint32_t>(model.dim()));
  w.u32(static_cast<std::uint32_t>(model.class_count()));
  write_shapes(w, model.field);
  write_shapes(w, model.velocity);
  w.f64(model.eta);
  w.u8(static_cast<std::uint8_t>(model.solver.method));
  w.u32(static_cast<std::uint32_t>(model.solver.steps));
  w.f64(model.solver.t0);
  w.f64(model.solver.t_end);
  w.u8(model.normalize_refined ? 1 : 0);
  for (std::size_t k = 0; k < model.class_count(); ++k) {
    w.str(k < model.class_names.size() ? model.class_names[k] : "class_" + std::to_string(k));
  }
  for (const Mlp* net : {&model.field, &model.velocity}) {
    for (double x : net->flatten()) w.f64(x);
  }
  for (double x : model.classifier.flat()) w.f64(x);
  return w.take();
}

SonoModel decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes, ErrorCode::ShapeMismatch);
  if (!r.magic(kCheckpointMagic)) throw Error(ErrorCode::BadMagic, "not a checkpoint file");
  SonoModel model;
  const std::uint32_t dim = r.u32();
  const std::uint32_t classes = r.u32();
  if (dim == 0 || classes == 0) throw Error(ErrorCode::ShapeMismatch, "empty model dimensions");
  std::uint64_t params = static_cast<std::uint64_t>(classes) * dim;
  model.field = read_shapes(r, params);
  model.velocity = read_shapes(r, params);
  model.eta = r.f64();
  const std::uint8_t method = r.u8();
  if (method > static_cast<std::uint8_t>(Method::Abm4)) {
    throw Error(ErrorCode::ShapeMismatch, "unknown solver id " + std::to_string(method));
  }
  model.solver.method = static_cast<Method>(method);
  model.solver.steps = static_cast<int>(r.u32());
  model.solver.t0 = r.f64();
  model.solver.t_end = r.f64();
  model.normalize_refined = r.u8() != 0;
  for (std::uint32_t k = 0; k < classes; ++k) model.class_names.push_back(r.str());
  if (r.remaining() != params * 8) {
    throw Error(ErrorCode::ShapeMismatch, "parameter block holds " +
                                              std::to_string(r.remaining()) + " bytes, expected " +
                                              std::to_string(params * 8));
  }
  read_params(r, model.field);
  read_params(r, model.velocity);
  Vector w(static_cast<std::size_t>(classes) * dim);
  for (double& x : w) x = r.f64();
  model.classifier = Matrix(classes, dim, std::move(w));
  model.validate();
  return model;
}

void write_checkpoint(const SonoModel& model, const std::filesystem::path& path) {
  write_file_bytes(path, encode_checkpoint(model));
}

SonoModel read_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file_bytes(path));
}

FewShotSet group_by_label(const EmbeddingSet& set, std::size_t class_count) {
  if (!set.has_labels()) throw Error(ErrorCode::CountMismatch, "embedding set has no labels");
  FewShotSet out;
  out.shots.resize(class_count);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const std::int32_t label = set.labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= class_count) {
      throw Error(ErrorCode::IndexOutOfRange, "label " + std::to_string(label) + " out of range");
    }
    out.shots[static_cast<std::size_t>(label)].push_back(set.rows[i]);
  }
  return out;
}

EmbeddingSet flatten_shots(const FewShotSet& shots) {
  EmbeddingSet set;
  set.dim = shots.dim();
  for (std::size_t k = 0; k < shots.class_count(); ++k) {
    for (const Vector& row : shots.shots[k]) {
      set.rows.push_back(row);
      set.labels.push_back(static_cast<std::int32_t>(k));
    }
  }
  return set;
}

FewShotSet sample_shots(const FewShotSet& pool, std::size_t n, std::uint64_t seed) {
  Philox rng(seed, 0x5807);
  FewShotSet out;
  out.shots.resize(pool.class_count());
  for (std::size_t k = 0; k < pool.class_count(); ++k) {
    const auto& cls = pool.shots[k];
    if (cls.size() < n) {
      throw Error(ErrorCode::CountMismatch, "class " + std::to_string(k) + " has " +
                                                std::to_string(cls.size()) + " features, need " +
                                                std::to_string(n));
    }
    std::vector<std::size_t> idx(cls.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Partial Fisher-Yates: the first n slots become a uniform sample.
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
      std::swap(idx[i], idx[j]);
    }
    for (std::size_t i = 0; i < n; ++i) out.shots[k].push_back(cls[idx[i]]);
  }
  return out;
}

void SyntheticSpec::validate() const {
  if (classes < 2 || dim < 1 || train_per_class < 1 || test_per_class < 1 ||
      prompts_per_class < 1) {
    throw Error(ErrorCode::InvalidArgument, "synthetic counts must be positive (K >= 2)");
  }
  if (!(sigma >= 0.0) || !(prompt_sigma >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "noise levels must be nonnegative");
  }
  if (!(min_angle_deg > 0.0 && min_angle_deg <= 90.0)) {
    throw Error(ErrorCode::InvalidArgument, "minimum angle must lie in (0, 90] degrees");
  }
}

namespace {

Vector gaussian_vector(Philox& rng, std::size_t d, double scale) {
  Vector v(d);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

Vector noisy_unit(Philox& rng, const Vector& center, double sigma) {
  if (sigma == 0.0) return center;
  Vector v = center;
  for (double& x : v) x += sigma * rng.normal();
  return l2_normalize(v);
}

std::vector<Vector> draw_centers(const SyntheticSpec& spec, Philox& rng) {
  constexpr int kMaxAttempts = 100000;
  const std::size_t k = spec.classes;
  const std::size_t d = spec.dim;
  std::vector<Vector> centers;
  if (spec.min_angle_deg == 90.0) {
    if (k > d) {
      throw Error(ErrorCode::AngleInfeasible, "cannot place " + std::to_string(k) +
                                                  " orthogonal centers in dimension " +
                                                  std::to_string(d));
    }
    while (centers.size() < k) {
      Vector v = gaussian_vector(rng, d, 1.0);
      for (const Vector& c : centers) axpy(v, -dot(v, c), c);
      if (norm2(v) > 1e-6) centers.push_back(l2_normalize(v));
    }
    return centers;
  }
  const double max_cos = std::cos(spec.min_angle_deg * std::numbers::pi / 180.0);
  while (centers.size() < k) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      Vector v = gaussian_vector(rng, d, 1.0);
      if (norm2(v) <= kNormTolerance) continue;
      v = l2_normalize(v);
      placed = std::all_of(centers.begin(), centers.end(),
                           [&](const Vector& c) { return dot(v, c) <= max_cos; });
      if (placed) centers.push_back(std::move(v));
    }
    if (!placed) {
      throw Error(ErrorCode::AngleInfeasible,
                  "could not place center " + std::to_string(centers.size()) + " of " +
                      std::to_string(k) + " with minimum angle " +
                      std::to_string(spec.min_angle_deg) + " in dimension " + std::to_string(d));
    }
  }
  return centers;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Philox center_rng(spec.seed, 0);
  Philox train_rng(spec.seed, 1);
  Philox test_rng(spec.seed, 2);
  Philox prompt_rng(spec.seed, 3);

  SyntheticData data;
  data.centers = draw_centers(spec, center_rng);
  const std::size_t k = spec.classes;
  data.train.shots.resize(k);
  data.test.dim = spec.dim;
  data.codebook.prompts.resize(k);
  data.codebook.texts.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    const Vector& center = data.centers[c];
    const std::string name = "class_" + std::to_string(c);
    data.codebook.class_names.push_back(name);
    for (std::size_t i = 0; i < spec.train_per_class; ++i) {
      data.train.shots[c].push_back(noisy_unit(train_rng, center, spec.sigma));
    }
    for (std::size_t m = 0; m < spec.prompts_per_class; ++m) {
      data.codebook.prompts[c].push_back(noisy_unit(prompt_rng, center, spec.prompt_sigma));
      data.codebook.texts[c].push_back("synthetic prompt " + std::to_string(m) + " for " + name);
    }
    data.text_init.push_back(center);
  }
  // Test rows are interleaved by class so any prefix is roughly balanced.
  for (std::size_t i = 0; i < spec.test_per_class; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      data.test.rows.push_back(noisy_unit(test_rng, data.centers[c], spec.sigma));
      data.test.labels.push_back(static_cast<std::int32_t>(c));
    }
  }
  return data;
}

}  // namespace sono
