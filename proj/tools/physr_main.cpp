#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>

#include "json.hpp"
#include "physr/physr.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitStage = 3;

struct RunFlags {
  std::optional<fs::path> config_file;
  std::optional<fs::path> materials;
  std::string provider = "analytic";
  std::optional<fs::path> embeddings;
  std::optional<int> n_target, k_views, knn_k, normal_k;
  std::optional<std::vector<int>> scales;
  std::optional<double> temperature, lambda, epsilon;
  std::optional<std::size_t> max_batch, view_limit;
  bool no_metric_scale = false;
  std::optional<std::string> length_mode;
};

void add_run_flags(CLI::App& cmd, RunFlags& f) {
  cmd.add_option("--config", f.config_file, "JSON run configuration; flags override it");
  cmd.add_option("--materials", f.materials, "material dictionary overriding the bundle's");
  cmd.add_option("--provider", f.provider, "embedding provider: analytic | files")->check(CLI::IsMember({"analytic", "files"}));
  cmd.add_option("--embeddings", f.embeddings, "directory of precomputed embeddings (provider files)");
  cmd.add_option("--n-target", f.n_target, "target number of source points");
  cmd.add_option("--k-views", f.k_views, "views kept per source point");
  cmd.add_option("--scales", f.scales, "patch side lengths in pixels")->delimiter(',');
  cmd.add_option("--temperature", f.temperature, "softmax temperature");
  cmd.add_option("--lambda", f.lambda, "thickness correction factor");
  cmd.add_option("--knn-k", f.knn_k, "neighbours for densification");
  cmd.add_option("--normal-k", f.normal_k, "neighbours for normal estimation");
  cmd.add_option("--epsilon", f.epsilon, "visibility depth slack in metres");
  cmd.add_option("--max-batch", f.max_batch, "largest provider batch");
  cmd.add_option("--view-limit", f.view_limit, "use at most this many evenly spaced views");
  cmd.add_flag("--no-metric-scale", f.no_metric_scale, "skip alignment to reference poses");
  cmd.add_option("--length-mode", f.length_mode, "characteristic length: area | axis")
      ->check(CLI::IsMember({"area", "axis"}));
}

template <typename T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

physr::integrate::CharacteristicLength parse_length_mode(const std::string& s) {
  if (s == "area") return physr::integrate::CharacteristicLength::kSurfaceArea;
  if (s == "axis") return physr::integrate::CharacteristicLength::kLongestAxis;
  throw physr::ConfigError("length_mode must be 'area' or 'axis'");
}

// File values first, then flags.
physr::RunConfig resolve_config(RunFlags& f) {
  physr::RunConfig c;
  if (f.config_file) {
    std::ifstream in(*f.config_file);
    if (!in) throw physr::IoError(f.config_file->string(), "cannot open config file");
    json j;
    try {
      j = json::parse(in);
      take(j, "n_target", c.n_target);
      take(j, "k_views", c.k_views);
      take(j, "scales", c.scales);
      take(j, "temperature", c.temperature);
      take(j, "lambda", c.lambda);
      take(j, "knn_k", c.knn_k);
      take(j, "normal_k", c.normal_k);
      take(j, "max_batch", c.max_batch);
      take(j, "metric_scale", c.metric_scale);
      if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
      if (j.contains("view_limit")) c.view_limit = j.at("view_limit").get<std::size_t>();
      if (j.contains("length_mode")) c.length_mode = parse_length_mode(j.at("length_mode").get<std::string>());
      if (j.contains("provider") && f.provider == "analytic") f.provider = j.at("provider").get<std::string>();
      if (j.contains("embeddings") && !f.embeddings) f.embeddings = j.at("embeddings").get<std::string>();
      if (j.contains("materials") && !f.materials) f.materials = j.at("materials").get<std::string>();
    } catch (const json::exception& e) {
      throw physr::ConfigError(f.config_file->string() + ": " + e.what());
    }
  }
  if (f.n_target) c.n_target = *f.n_target;
  if (f.k_views) c.k_views = *f.k_views;
  if (f.scales) c.scales = *f.scales;
  if (f.temperature) c.temperature = *f.temperature;
  if (f.lambda) c.lambda = *f.lambda;
  if (f.knn_k) c.knn_k = *f.knn_k;
  if (f.normal_k) c.normal_k = *f.normal_k;
  if (f.epsilon) c.epsilon = *f.epsilon;
  if (f.max_batch) c.max_batch = *f.max_batch;
  if (f.view_limit) c.view_limit = *f.view_limit;
  if (f.no_metric_scale) c.metric_scale = false;
  if (f.length_mode) c.length_mode = parse_length_mode(*f.length_mode);
  c.validate();
  return c;
}

std::unique_ptr<physr::PatchEmbeddingProvider> make_provider(const RunFlags& f) {
  if (f.provider == "files") {
    if (!f.embeddings) throw physr::ConfigError("provider 'files' needs --embeddings");
    return std::make_unique<physr::FileEmbeddingProvider>(*f.embeddings);
  }
  if (f.provider != "analytic") throw physr::ConfigError("unknown provider '" + f.provider + "'");
  return std::make_unique<physr::MeanColorProvider>();
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw physr::IoError(path.string(), "cannot open for writing");
  out << text;
}

void print_summary(const physr::PropertyReport& r) {
  std::cout << r.scene_id << ": mass " << r.estimate.mass_kg << " kg [" << r.estimate.mass_range.lo << ", "
            << r.estimate.mass_range.hi << "]";
  if (r.ground_truth_mass_kg) std::cout << " (truth " << *r.ground_truth_mass_kg << ")";
  std::cout << "; ingest " << r.timings.ingest << " s, fusion " << r.timings.fusion << " s, inference "
            << r.timings.inference << " s\n";
}

struct SynthFlags {
  std::string scene = "unit_box";
  std::uint64_t seed = 0;
  fs::path out;
  std::optional<std::size_t> points;
  std::optional<int> views, width, height, feature_dim, feature_stride;
  std::optional<double> radius, true_scale, feature_noise, depth_noise;
  bool random_frame = false;
  bool unproject = false;
  bool no_materials = false;
  bool no_reference_poses = false;
};

int cmd_synth(const SynthFlags& f) {
  using namespace physr::synth;
  SyntheticScene s;
  if (f.scene == "unit_box") s = scenes::unit_box(1000.0, 0.01, f.seed);
  else if (f.scene == "sphere") s = scenes::sphere(f.radius.value_or(0.5), 1000.0, 0.01, f.seed);
  else if (f.scene == "table") s = scenes::table(f.seed);
  else if (f.scene == "interleaved") s = scenes::interleaved(f.seed);
  else if (f.scene == "occlusion") s = scenes::occlusion_pair(f.seed);
  else s = scenes::random_object(f.seed);
  if (f.points) s.point_count = *f.points;
  if (f.views) s.cameras.count = *f.views;
  if (f.width) s.cameras.width = *f.width;
  if (f.height) s.cameras.height = *f.height;
  if (f.feature_dim) s.feature_dim = *f.feature_dim;
  if (f.feature_stride) s.feature_stride = *f.feature_stride;
  if (f.true_scale) s.true_scale = *f.true_scale;
  if (f.feature_noise) s.feature_noise = *f.feature_noise;
  if (f.depth_noise) s.depth_noise = *f.depth_noise;
  s.random_frame = f.random_frame;
  if (f.unproject) s.sampling = CloudSampling::kDepthUnproject;
  s.include_materials = !f.no_materials;
  s.include_reference_poses = !f.no_reference_poses;
  const auto capture = generate(s);
  physr::save_bundle(capture.bundle, f.out);
  std::cout << "wrote " << f.out.string() << ": " << capture.bundle.views.size() << " views, "
            << capture.bundle.cloud.size() << " points, analytic mass " << capture.truth.mass_kg << " kg\n";
  return kExitOk;
}

int cmd_run(const fs::path& bundle, const fs::path& out, RunFlags& f, bool field_only) {
  const auto config = resolve_config(f);
  const auto provider = make_provider(f);
  const auto report = physr::run_pipeline(bundle, config, *provider, f.materials);
  if (field_only) {
    physr::report::write_field_ply(out, report.field);
  } else {
    physr::report::write_run_outputs(out, report);
  }
  print_summary(report);
  return kExitOk;
}

int cmd_eval(const std::vector<fs::path>& inputs, const fs::path& out, RunFlags& f) {
  const auto config = resolve_config(f);
  const auto provider = make_provider(f);
  std::vector<physr::metrics::EvalRow> rows;
  for (const auto& input : inputs) {
    physr::metrics::EvalRow row;
    if (fs::is_regular_file(input)) {
      std::ifstream in(input);
      const json j = json::parse(in, nullptr, false);
      if (j.is_discarded() || !j.contains("mass_kg") || !j.contains("ground_truth_mass_kg")) {
        throw physr::ValidationError(input.string() + ": not a report with a ground-truth mass");
      }
      row.scene_id = j.value("scene_id", input.stem().string());
      row.pair = {j.at("mass_kg").at("value").get<double>(), j.at("ground_truth_mass_kg").get<double>()};
    } else {
      const auto report = physr::run_pipeline(input, config, *provider, f.materials);
      if (!report.ground_truth_mass_kg) {
        throw physr::ValidationError(input.string() + ": manifest has no ground_truth_mass_kg");
      }
      row.scene_id = report.scene_id;
      row.pair = {report.estimate.mass_kg, *report.ground_truth_mass_kg};
      physr::report::write_run_outputs(out / "runs" / report.scene_id, report);
    }
    rows.push_back(row);
  }
  std::vector<physr::metrics::MassPair> pairs;
  for (const auto& r : rows) pairs.push_back(r.pair);
  const auto e = physr::metrics::evaluate(pairs);
  write_text(out / physr::report::kEvalCsvName, physr::metrics::eval_rows_csv(rows));
  const json summary = {{"count", e.count}, {"ade", e.ade}, {"alde", e.alde}, {"ape", e.ape}, {"mnre", e.mnre}};
  write_text(out / physr::report::kEvalJsonName, summary.dump(2) + "\n");
  std::cout << "ADE " << e.ade << "  ALDE " << e.alde << "  APE " << e.ape << "  MnRE " << e.mnre << " over "
            << e.count << " scenes\n";
  return kExitOk;
}

int cmd_bench(const std::vector<fs::path>& inputs, const fs::path& out, RunFlags& f, int repeats, bool naive) {
  physr::bench::BenchConfig bc;
  bc.run = resolve_config(f);
  bc.repeats = repeats;
  bc.naive = naive;
  const auto provider = make_provider(f);
  const auto result = physr::bench::run_bench(inputs, bc, *provider);
  write_text(out / physr::report::kBenchName, physr::report::bench_json(result));
  std::cout << "stage        median_s    p95_s\n";
  for (const char* stage : {"ingest", "fusion", "inference", "total"}) {
    const auto& s = result.stages.at(stage);
    std::cout << std::left << std::setw(12) << stage << ' ' << std::setw(11) << s.median << ' ' << s.p95 << '\n';
  }
  if (naive) {
    std::cout << "naive/optimized patches " << result.patch_ratio << "x, fusion wall time " << result.wall_time_ratio
              << "x\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physical property fields from posed multi-view captures"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "log progress to stderr");

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic bundle with an analytic ground truth");
  synth_cmd->add_option("--scene", synth.scene, "unit_box | sphere | table | interleaved | occlusion | object")
      ->check(CLI::IsMember({"unit_box", "sphere", "table", "interleaved", "occlusion", "object"}));
  synth_cmd->add_option("--seed", synth.seed, "generator seed");
  synth_cmd->add_option("--out", synth.out, "output bundle directory")->required();
  synth_cmd->add_option("--points", synth.points, "cloud size");
  synth_cmd->add_option("--views", synth.views, "camera count");
  synth_cmd->add_option("--width", synth.width, "image width");
  synth_cmd->add_option("--height", synth.height, "image height");
  synth_cmd->add_option("--feature-dim", synth.feature_dim, "geometric feature dimension");
  synth_cmd->add_option("--feature-stride", synth.feature_stride, "image pixels per feature cell");
  synth_cmd->add_option("--radius", synth.radius, "sphere radius");
  synth_cmd->add_option("--true-scale", synth.true_scale, "metres per bundle unit");
  synth_cmd->add_option("--feature-noise", synth.feature_noise, "feature noise sigma");
  synth_cmd->add_option("--depth-noise", synth.depth_noise, "multiplicative depth noise sigma");
  synth_cmd->add_flag("--random-frame", synth.random_frame, "rotate and translate the bundle frame");
  synth_cmd->add_flag("--unproject", synth.unproject, "lift the cloud from depth pixels");
  synth_cmd->add_flag("--no-materials", synth.no_materials, "omit materials.json");
  synth_cmd->add_flag("--no-reference-poses", synth.no_reference_poses, "omit metric reference poses");

  RunFlags run_flags;
  fs::path run_bundle, run_out;
  auto* run_cmd = app.add_subcommand("run", "run the pipeline on one bundle");
  run_cmd->add_option("bundle", run_bundle, "bundle directory")->required()->check(CLI::ExistingDirectory);
  run_cmd->add_option("--out", run_out, "output directory (report.json, field.ply)")->required();
  add_run_flags(*run_cmd, run_flags);

  RunFlags field_flags;
  fs::path field_bundle, field_out;
  auto* field_cmd = app.add_subcommand("export-field", "run the pipeline and write only the property field");
  field_cmd->add_option("bundle", field_bundle, "bundle directory")->required()->check(CLI::ExistingDirectory);
  field_cmd->add_option("--out", field_out, "output PLY path")->required();
  add_run_flags(*field_cmd, field_flags);

  RunFlags eval_flags;
  std::vector<fs::path> eval_inputs;
  fs::path eval_out;
  auto* eval_cmd = app.add_subcommand("eval", "mass metrics over bundles or report.json files");
  eval_cmd->add_option("inputs", eval_inputs, "bundle directories or report files")->required();
  eval_cmd->add_option("--out", eval_out, "output directory (eval.csv, eval.json)")->required();
  add_run_flags(*eval_cmd, eval_flags);

  RunFlags bench_flags;
  std::vector<fs::path> bench_inputs;
  fs::path bench_out;
  int repeats = 3;
  bool naive = false;
  auto* bench_cmd = app.add_subcommand("bench", "per-stage latency median and p95");
  bench_cmd->add_option("bundles", bench_inputs, "bundle directories")->required()->check(CLI::ExistingDirectory);
  bench_cmd->add_option("--out", bench_out, "output directory (bench.json)")->required();
  bench_cmd->add_option("--repeats", repeats, "runs per bundle");
  bench_cmd->add_flag("--naive", naive, "also time the dense reference path");
  add_run_flags(*bench_cmd, bench_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  if (verbose) physr::set_log_level(physr::LogLevel::kInfo);

  try {
    if (*synth_cmd) return cmd_synth(synth);
    if (*run_cmd) return cmd_run(run_bundle, run_out, run_flags, false);
    if (*field_cmd) return cmd_run(field_bundle, field_out, field_flags, true);
    if (*eval_cmd) return cmd_eval(eval_inputs, eval_out, eval_flags);
    if (*bench_cmd) return cmd_bench(bench_inputs, bench_out, bench_flags, repeats, naive);
  } catch (const physr::StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStage;
  } catch (const physr::ProviderError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStage;
  } catch (const physr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStage;
  }
  return kExitOk;
}
