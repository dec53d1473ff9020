#include "sono/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sono/adjoint.hpp"
#include "sono/augment.hpp"
#include "sono/datio.hpp"
#include "sono/kernels.hpp"
#include "sono/model.hpp"
#include "sono/odeint.hpp"
#include "sono/philox.hpp"
#include "sono/train.hpp"

namespace sono::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Data directory layout shared by synth (writer) and every consumer.
constexpr const char* kTrainFile = "train.emb";
constexpr const char* kTestFile = "test.emb";
constexpr const char* kTextFile = "text.emb";
constexpr const char* kPromptVectorsFile = "prompts.emb";
constexpr const char* kPromptMetaFile = "prompts.json";

struct DataDir {
  FewShotSet pool;
  EmbeddingSet test;
  PromptCodebook codebook;
  std::vector<Vector> text_init;
  bool has_test = false;
};

DataDir load_data(const fs::path& dir) {
  DataDir data;
  const EmbeddingSet text = read_embeddings(dir / kTextFile);
  data.text_init = text.rows;
  const std::size_t k = text.size();
  data.pool = group_by_label(read_embeddings(dir / kTrainFile), k);
  data.codebook = read_codebook(dir / kPromptMetaFile, dir / kPromptVectorsFile);
  if (data.codebook.class_count() != k) {
    throw Error(ErrorCode::CountMismatch, "codebook and text-init class counts differ");
  }
  if (fs::exists(dir / kTestFile)) {
    data.test = read_embeddings(dir / kTestFile);
    data.has_test = true;
  }
  return data;
}

void write_text(const fs::path& path, const std::string& text) {
  write_file_bytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

// Shortest text that reads back to the same double.
std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// Flags shared by train, ablate and solver-bench.
struct TrainFlags {
  TrainConfig cfg;
  std::string solver = "rk4";
  bool no_tia = false;
  bool no_snm = false;

  void attach(CLI::App* app) {
    app->add_option("--shots", cfg.shots, "Image shots per class")->check(CLI::PositiveNumber);
    app->add_option("--l", cfg.augment, "Prompt features added per class");
    app->add_option("--eta", cfg.eta, "Residual ratio in [0, 1]")->check(CLI::Range(0.0, 1.0));
    app->add_option("--solver", solver, "euler | rk4 | ab4 | abm4")
        ->check(CLI::IsMember({"euler", "rk4", "ab4", "abm4"}));
    app->add_option("--steps", cfg.solver.steps, "Solver steps over [t0, t_end]")
        ->check(CLI::Range(1, kMaxSolverSteps));
    app->add_option("--t-end", cfg.solver.t_end, "Integration horizon");
    app->add_option("--epochs", cfg.epochs)->check(CLI::PositiveNumber);
    app->add_option("--lr", cfg.lr_init, "Initial learning rate")->check(CLI::NonNegativeNumber);
    app->add_option("--weight-decay", cfg.adamw.weight_decay)->check(CLI::NonNegativeNumber);
    app->add_option("--batch-size", cfg.batch_size)->check(CLI::PositiveNumber);
    app->add_option("--hidden", cfg.hidden, "Hidden width of the refiner networks")
        ->check(CLI::PositiveNumber);
    app->add_flag("--no-tia", no_tia, "Train without prompt-origin features");
    app->add_flag("--no-snm", no_snm, "Bypass the ODE refiner");
    app->add_flag("--normalize-refined", cfg.normalize_refined,
                  "L2-normalize refined features before the classifier");
  }

  TrainConfig resolve(std::uint64_t seed) const {
    TrainConfig c = cfg;
    c.seed = seed;
    c.solver.method = parse_method(solver);
    c.tia_on = !no_tia;
    c.snm_on = !no_snm;
    c.validate();
    return c;
  }
};

json config_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"lr", c.lr_init},
          {"weight_decay", c.adamw.weight_decay},
          {"betas", {c.adamw.beta1, c.adamw.beta2}},
          {"eps", c.adamw.eps},
          {"batch_size", c.batch_size},
          {"seed", c.seed},
          {"shots", c.shots},
          {"l", c.augment},
          {"eta", c.eta},
          {"solver", std::string(method_name(c.solver.method))},
          {"steps", c.solver.steps},
          {"t0", c.solver.t0},
          {"t_end", c.solver.t_end},
          {"hidden", c.hidden},
          {"normalize_refined", c.normalize_refined},
          {"tia", c.tia_on},
          {"snm", c.snm_on}};
}

int cmd_synth(const SyntheticSpec& spec, const fs::path& out_dir, std::ostream& out) {
  const SyntheticData data = generate_synthetic(spec);
  fs::create_directories(out_dir);
  write_embeddings(flatten_shots(data.train), out_dir / kTrainFile);
  write_embeddings(data.test, out_dir / kTestFile);
  EmbeddingSet text;
  text.dim = spec.dim;
  text.rows = data.text_init;
  for (std::size_t k = 0; k < data.text_init.size(); ++k) {
    text.labels.push_back(static_cast<std::int32_t>(k));
  }
  write_embeddings(text, out_dir / kTextFile);
  write_codebook(data.codebook, out_dir / kPromptMetaFile, out_dir / kPromptVectorsFile);
  out << "wrote " << kTrainFile << ", " << kTestFile << ", " << kTextFile << ", "
      << kPromptVectorsFile << " (+" << kPromptMetaFile << ") to " << out_dir.string() << "\n";
  return kOk;
}

int cmd_augment(const fs::path& data_dir, std::size_t shots, std::size_t l, std::uint64_t seed,
                const fs::path& out_dir, std::ostream& out) {
  const DataDir data = load_data(data_dir);
  const FewShotSet sampled = sample_shots(data.pool, shots, seed);
  const AugmentedSet aug = build_augmented_set(sampled, data.codebook, l);
  EmbeddingSet flat;
  flat.dim = aug.dim();
  json origins = json::array();
  for (std::size_t k = 0; k < aug.class_count(); ++k) {
    for (const auto& f : aug.classes[k]) {
      flat.rows.push_back(f.feature);
      flat.labels.push_back(static_cast<std::int32_t>(k));
      const bool image = f.origin.kind == FeatureOrigin::Kind::Image;
      json o = {{"class", k}, {"origin", image ? "image" : "prompt"}, {"index", f.origin.index}};
      if (!image) o["similarity"] = f.similarity;
      origins.push_back(std::move(o));
    }
  }
  fs::create_directories(out_dir);
  write_embeddings(flat, out_dir / "augmented.emb");
  write_text(out_dir / "augmented.json", json{{"shots", shots}, {"l", l}, {"seed", seed},
                                               {"rows", origins}}
                                              .dump(2) +
                                              "\n");
  out << "augmented set: " << aug.class_count() << " classes, " << aug.total() << " features\n";
  return kOk;
}

int cmd_train(const fs::path& data_dir, const TrainConfig& cfg, const fs::path& out_dir,
              std::ostream& out) {
  const DataDir data = load_data(data_dir);
  const FewShotSet sampled = sample_shots(data.pool, cfg.shots, cfg.seed);
  const AugmentedSet aug = build_augmented_set(sampled, data.codebook, cfg.augment);
  const auto start = std::chrono::steady_clock::now();
  FitResult fr = fit(aug, data.text_init, cfg);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  fr.model.class_names = data.codebook.class_names;

  fs::create_directories(out_dir);
  write_checkpoint(fr.model, out_dir / "model.ckpt");
  write_text(out_dir / "metrics.jsonl", metrics_jsonl(fr.history));
  json summary = {{"config", config_json(cfg)},
                  {"train_features", fr.history.back().samples},
                  {"final_loss", fr.history.back().loss},
                  {"final_train_accuracy", fr.history.back().accuracy},
                  {"wall_time_seconds", seconds},
                  {"kernels", std::string(kernels::backend_name(kernels::active().backend))}};
  if (data.has_test) {
    const EvalMetrics em = evaluate(fr.model, data.test);
    summary["test_accuracy"] = em.accuracy;
    summary["test_loss"] = em.loss;
    summary["test_count"] = em.total;
  }
  write_text(out_dir / "summary.json", summary.dump(2) + "\n");
  out << summary.dump(2) << "\n";
  return kOk;
}

int cmd_eval(const fs::path& model_path, const fs::path& test_path, const std::string& out_path,
             std::ostream& out) {
  const SonoModel model = read_checkpoint(model_path);
  const EmbeddingSet test = read_embeddings(test_path);
  const EvalMetrics em = evaluate(model, test);
  const json j = {{"accuracy", em.accuracy},
                  {"loss", em.loss},
                  {"correct", em.correct},
                  {"total", em.total}};
  if (!out_path.empty()) write_text(out_path, j.dump(2) + "\n");
  out << j.dump() << "\n";
  return kOk;
}

int cmd_zeroshot(const fs::path& data_dir, double temperature, const std::string& out_path,
                 std::ostream& out) {
  const EmbeddingSet text = read_embeddings(data_dir / kTextFile);
  const EmbeddingSet test = read_embeddings(data_dir / kTestFile);
  if (test.rows.empty()) throw Error(ErrorCode::EmptyTestSet, "no test rows");
  if (!test.has_labels()) throw Error(ErrorCode::CountMismatch, "test set has no labels");
  std::size_t correct = 0;
  double loss = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const Vector p = zero_shot_predict(text.rows, test.rows[i], temperature);
    const auto label = static_cast<std::size_t>(test.labels[i]);
    if (argmax(p) == label) ++correct;
    loss += cross_entropy(p, label);
  }
  const json j = {{"accuracy", static_cast<double>(correct) / static_cast<double>(test.size())},
                  {"loss", loss / static_cast<double>(test.size())},
                  {"temperature", temperature},
                  {"total", test.size()}};
  if (!out_path.empty()) write_text(out_path, j.dump(2) + "\n");
  out << j.dump() << "\n";
  return kOk;
}

int cmd_solver_bench(const std::string& data_dir, const TrainConfig& base,
                     const fs::path& out_dir, std::ostream& out) {
  const Method methods[] = {Method::Euler, Method::Rk4, Method::Ab4, Method::Abm4};
  const Rhs growth = [](ConstSpan z, double, MutSpan dz) { dz[0] = z[0]; };
  const Rhs oscillator = [](ConstSpan z, double, MutSpan dz) {
    dz[0] = z[1];
    dz[1] = -z[0];
  };
  std::ostringstream csv;
  csv << "method,problem,steps,error,order\n";
  out << "method  steps  error(z'=z)      order\n";
  for (Method m : methods) {
    double prev = 0.0;
    for (int steps : {16, 32, 64, 128, 256}) {
      const Vector z = integrate(growth, Vector{1.0}, {m, steps, 0.0, 1.0});
      const double err = std::abs(z[0] - std::numbers::e);
      const double order = prev > 0.0 ? std::log2(prev / err) : std::nan("");
      csv << method_name(m) << ",growth," << steps << "," << format_double(err) << ","
          << format_double(order) << "\n";
      out << std::left << std::setw(8) << method_name(m) << std::setw(7) << steps
          << std::setw(17) << err << order << "\n";
      prev = err;
    }
    const Vector osc = integrate(oscillator, Vector{1.0, 0.0}, {m, 100, 0.0, std::numbers::pi / 2});
    const double osc_err = std::max(std::abs(osc[0]), std::abs(osc[1] + 1.0));
    csv << method_name(m) << ",oscillator,100," << format_double(osc_err) << ",\n";
  }
  fs::create_directories(out_dir);
  write_text(out_dir / "solver_convergence.csv", csv.str());

  if (!data_dir.empty()) {
    const DataDir data = load_data(data_dir);
    const FewShotSet sampled = sample_shots(data.pool, base.shots, base.seed);
    const AugmentedSet aug = build_augmented_set(sampled, data.codebook, base.augment);
    if (!data.has_test) throw Error(ErrorCode::EmptyTestSet, "solver-bench needs test.emb");
    std::ostringstream acc;
    acc << "method,steps,accuracy,seconds\n";
    for (Method m : methods) {
      TrainConfig cfg = base;
      cfg.solver.method = m;
      cfg.solver.steps = std::max(cfg.solver.steps, 4);
      const auto start = std::chrono::steady_clock::now();
      const FitResult fr = fit(aug, data.text_init, cfg);
      const double accuracy = evaluate(fr.model, data.test).accuracy;
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      acc << method_name(m) << "," << cfg.solver.steps << "," << format_double(accuracy) << ","
          << seconds << "\n";
      out << method_name(m) << " accuracy " << accuracy << "\n";
    }
    write_text(out_dir / "solver_accuracy.csv", acc.str());
  }
  return kOk;
}

double max_relative_error(ConstSpan a, ConstSpan b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a[i]), std::abs(b[i]), 1e-8});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

int cmd_gradcheck(std::size_t dim, int steps, std::size_t hidden, const std::string& solver,
                  std::uint64_t seed, std::ostream& out) {
  Philox rng(seed, 0x6c);
  Mlp field = Mlp::glorot(field_widths(dim, hidden), rng);
  for (auto& layer : field.layers()) {
    for (double& b : layer.bias) b = rng.uniform(-0.5, 0.5);
  }
  Vector z0(2 * dim), target(2 * dim);
  for (double& x : z0) x = rng.uniform(-1.0, 1.0);
  for (double& x : target) x = rng.uniform(-1.0, 1.0);
  const SolverConfig config{parse_method(solver), steps, 0.0, 1.0};
  config.validate();
  // L = 0.5 |z_end - target|^2
  const TerminalLoss loss = [&target](ConstSpan z, MutSpan g) {
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      g[i] = z[i] - target[i];
      s += 0.5 * g[i] * g[i];
    }
    return s;
  };
  const SecondOrderDynamics dyn(field);
  const GradientReport adj = grad_adjoint(dyn, z0, loss, config);

  // Central differences of the forward pipeline.
  const double h = 1e-5;
  Vector params = field.flatten();
  Vector fd(params.size());
  Vector scratch(2 * dim);
  for (std::size_t j = 0; j < params.size(); ++j) {
    const double keep = params[j];
    params[j] = keep + h;
    field.assign(params);
    const double up = loss(integrate(dyn.as_rhs(), z0, config), scratch);
    params[j] = keep - h;
    field.assign(params);
    const double down = loss(integrate(dyn.as_rhs(), z0, config), scratch);
    params[j] = keep;
    fd[j] = (up - down) / (2.0 * h);
  }
  field.assign(params);

  const double vs_fd = max_relative_error(adj.grad_params, fd);
  json j = {{"dim", dim},           {"steps", steps}, {"hidden", hidden},
            {"solver", solver},     {"params", params.size()},
            {"adjoint_vs_fd", vs_fd}};
  double worst = vs_fd;
  if (config.method == Method::Euler || config.method == Method::Rk4) {
    const GradientReport disc = grad_discrete(dyn, z0, loss, config);
    const double vs_disc = max_relative_error(adj.grad_params, disc.grad_params);
    j["adjoint_vs_discrete"] = vs_disc;
    j["discrete_vs_fd"] = max_relative_error(disc.grad_params, fd);
    worst = std::max(worst, vs_disc);
  }
  j["max_relative_error"] = worst;
  out << j.dump(2) << "\n";
  return worst > 1e-3 ? kNumerical : kOk;
}

int cmd_ablate(const fs::path& data_dir, const TrainConfig& base, std::size_t seed_count,
               bool sweep, const fs::path& out_dir, std::ostream& out) {
  const DataDir data = load_data(data_dir);
  if (!data.has_test) throw Error(ErrorCode::EmptyTestSet, "ablate needs test.emb");
  fs::create_directories(out_dir);
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < seed_count; ++i) seeds.push_back(base.seed + i);

  const auto rows = run_ablation(data.pool, data.test, data.codebook, data.text_init, base, seeds);
  std::ostringstream runs, summary;
  runs << "tia,snm,shots,seed,accuracy\n";
  summary << "tia,snm,shots,accuracy\n";
  std::map<std::pair<bool, bool>, std::pair<double, int>> mean;
  std::vector<std::pair<bool, bool>> order;
  for (const auto& r : rows) {
    runs << r.tia << "," << r.snm << "," << r.shots << "," << r.seed << ","
         << format_double(r.accuracy) << "\n";
    auto key = std::make_pair(r.tia, r.snm);
    if (!mean.count(key)) order.push_back(key);
    mean[key].first += r.accuracy;
    mean[key].second += 1;
  }
  for (const auto& key : order) {
    const double acc = mean[key].first / mean[key].second;
    summary << key.first << "," << key.second << "," << base.shots << "," << format_double(acc)
            << "\n";
  }
  write_text(out_dir / "ablation.csv", summary.str());
  write_text(out_dir / "ablation_runs.csv", runs.str());
  out << summary.str();

  if (sweep) {
    const std::vector<double> etas = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    const EtaSweep s = sweep_eta(data.pool, data.test, data.codebook, data.text_init, base, etas);
    std::ostringstream csv;
    csv << "eta,accuracy\n";
    for (const auto& p : s.points) csv << format_double(p.eta) << "," << format_double(p.accuracy) << "\n";
    write_text(out_dir / "eta_sweep.csv", csv.str());
    out << csv.str() << "linear_probe_accuracy " << s.linear_probe_accuracy
        << "\nmax_logit_gap_at_eta0 " << s.max_logit_gap_at_zero << "\n";
    if (s.max_logit_gap_at_zero > 1e-12) {
      out << "eta=0 model deviates from the linear probe\n";
      return kNumerical;
    }
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Few-shot classification with a second-order ODE feature refiner"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;

  SyntheticSpec synth_spec;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic embedding task");
  synth->add_option("--k", synth_spec.classes, "Classes")->check(CLI::Range(2, 100000));
  synth->add_option("--dim", synth_spec.dim, "Feature dimension")->check(CLI::PositiveNumber);
  synth->add_option("--shots", synth_spec.train_per_class, "Training features per class")
      ->check(CLI::PositiveNumber);
  synth->add_option("--test-per-class", synth_spec.test_per_class)->check(CLI::PositiveNumber);
  synth->add_option("--sigma", synth_spec.sigma, "Image feature noise");
  synth->add_option("--angle", synth_spec.min_angle_deg, "Minimum center angle in degrees");
  synth->add_option("--prompts", synth_spec.prompts_per_class, "Prompts per class (M)");
  synth->add_option("--prompt-sigma", synth_spec.prompt_sigma, "Prompt feature noise");
  synth->add_option("--seed", seed);
  synth->add_option("--out", synth_out)->required();

  std::string data_dir, out_dir;
  std::size_t aug_shots = 4, aug_l = 10;
  auto* augment = app.add_subcommand("augment", "Build the text-as-image augmented set");
  augment->add_option("--data", data_dir)->required();
  augment->add_option("--shots", aug_shots)->check(CLI::PositiveNumber);
  augment->add_option("--l", aug_l);
  augment->add_option("--seed", seed);
  augment->add_option("--out", out_dir)->required();

  TrainFlags train_flags;
  auto* train = app.add_subcommand("train", "Train the refiner and classifier");
  train->add_option("--data", data_dir)->required();
  train_flags.attach(train);
  train->add_option("--seed", seed);
  train->add_option("--out", out_dir)->required();

  std::string model_path, test_path, result_path;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a labeled embedding file");
  eval->add_option("--model", model_path)->required();
  auto* eval_data = eval->add_option("--data", data_dir, "Directory holding test.emb");
  auto* eval_test = eval->add_option("--test", test_path, "Labeled embedding file");
  eval_data->excludes(eval_test);
  eval->add_option("--seed", seed);
  eval->add_option("--out", result_path, "Write the result JSON here");

  double temperature = 0.01;
  auto* zeroshot = app.add_subcommand("zeroshot", "Zero-shot baseline over text embeddings");
  zeroshot->add_option("--data", data_dir)->required();
  zeroshot->add_option("--temperature", temperature)->check(CLI::PositiveNumber);
  zeroshot->add_option("--seed", seed);
  zeroshot->add_option("--out", result_path);

  TrainFlags bench_flags;
  std::string bench_data;
  auto* bench = app.add_subcommand("solver-bench", "Compare Euler, RK4, AB4 and ABM4");
  bench->add_option("--data", bench_data, "Optionally train once per solver on this data");
  bench_flags.attach(bench);
  bench->add_option("--seed", seed);
  bench->add_option("--out", out_dir)->required();

  std::size_t gc_dim = 4, gc_hidden = 8;
  int gc_steps = 20;
  std::string gc_solver = "rk4";
  auto* gradcheck = app.add_subcommand("gradcheck", "Check adjoint gradients on a random field");
  gradcheck->add_option("--dim", gc_dim)->check(CLI::Range(1, 64));
  gradcheck->add_option("--steps", gc_steps)->check(CLI::Range(1, kMaxSolverSteps));
  gradcheck->add_option("--hidden", gc_hidden)->check(CLI::Range(1, 256));
  gradcheck->add_option("--solver", gc_solver)->check(CLI::IsMember({"euler", "rk4", "ab4", "abm4"}));
  gradcheck->add_option("--seed", seed);

  TrainFlags ablate_flags;
  std::size_t seed_count = 5;
  bool sweep_eta_flag = false;
  auto* ablate = app.add_subcommand("ablate", "Train the four augmentation/refiner combinations");
  ablate->add_option("--data", data_dir)->required();
  ablate_flags.attach(ablate);
  ablate->add_option("--seeds", seed_count, "Number of seeds (seed, seed+1, ...)")
      ->check(CLI::PositiveNumber);
  ablate->add_flag("--sweep-eta", sweep_eta_flag, "Also sweep eta over {0, 0.2, ..., 1}");
  ablate->add_option("--seed", seed);
  ablate->add_option("--out", out_dir)->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (synth->parsed()) {
      synth_spec.seed = seed;
      return cmd_synth(synth_spec, synth_out, out);
    }
    if (augment->parsed()) return cmd_augment(data_dir, aug_shots, aug_l, seed, out_dir, out);
    if (train->parsed()) return cmd_train(data_dir, train_flags.resolve(seed), out_dir, out);
    if (eval->parsed()) {
      if (data_dir.empty() && test_path.empty()) {
        err << "eval: one of --data or --test is required\n";
        return kUsage;
      }
      const fs::path test = test_path.empty() ? fs::path(data_dir) / kTestFile : fs::path(test_path);
      return cmd_eval(model_path, test, result_path, out);
    }
    if (zeroshot->parsed()) return cmd_zeroshot(data_dir, temperature, result_path, out);
    if (bench->parsed()) return cmd_solver_bench(bench_data, bench_flags.resolve(seed), out_dir, out);
    if (gradcheck->parsed()) return cmd_gradcheck(gc_dim, gc_steps, gc_hidden, gc_solver, seed, out);
    if (ablate->parsed()) {
      return cmd_ablate(data_dir, ablate_flags.resolve(seed), seed_count, sweep_eta_flag, out_dir,
                        out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Usage: return kUsage;
      case ErrorKind::Data: return kData;
      case ErrorKind::Numerical: return kNumerical;
    }
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}

}  // namespace sono::cli
