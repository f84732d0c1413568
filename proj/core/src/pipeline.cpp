#include "physr/pipeline.hpp"

#include <chrono>
#include <future>

#include "physr/errors.hpp"
#include "physr/fusion.hpp"
#include "physr/geometry.hpp"
#include "physr/grounding.hpp"
#include "physr/log.hpp"
#include "physr/sampling.hpp"
#include "physr/view_select.hpp"

namespace physr {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Accumulates sub-stage timings and rewraps failures with the stage name.
class StageRunner {
 public:
  explicit StageRunner(StageTimings& timings) : timings_(timings) {}

  template <typename Fn>
  auto run(const std::string& stage, const std::string& step, Fn&& fn) {
    const auto start = Clock::now();
    auto record = [&] {
      const double s = seconds_since(start);
      timings_.detail.push_back({stage, step, s});
      if (stage == "ingest") timings_.ingest += s;
      if (stage == "fusion") timings_.fusion += s;
      if (stage == "inference") timings_.inference += s;
    };
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        record();
      } else {
        auto result = fn();
        record();
        return result;
      }
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(stage, step + ": " + e.what());
    }
  }

 private:
  StageTimings& timings_;
};

struct Prepared {
  CaptureBundle scaled;  // filled only when a copy was needed
  const CaptureBundle* active = nullptr;
  geometry::VisibilityMask visibility;
  double epsilon = 0.0;
  bool scaled_applied = false;
  double scale = 1.0;
};

// View subset, metric scale and visibility; shared with the naive path.
void prepare(const CaptureBundle& bundle, const RunConfig& config, StageRunner& runner, Prepared& out) {
  out.active = &bundle;
  if (config.view_limit && *config.view_limit < bundle.views.size()) {
    out.scaled = runner.run("ingest", "view_subset", [&] { return select_views(bundle, *config.view_limit); });
    out.active = &out.scaled;
  }
  if (config.metric_scale && out.active->reference_poses) {
    out.scaled = runner.run("ingest", "scale", [&] {
      std::vector<CameraPose> poses;
      for (const auto& v : out.active->views) poses.push_back(v.pose);
      const auto t = geometry::sim3_align(poses, *out.active->reference_poses);
      out.scale = t.scale;
      return geometry::apply_scale(*out.active, t);
    });
    out.active = &out.scaled;
    out.scaled_applied = true;
  } else if (config.metric_scale) {
    log_warning("bundle has no reference poses; running without metric scale");
  }
  out.epsilon = config.epsilon.value_or(geometry::default_visibility_epsilon(out.active->cloud.positions));
  out.visibility = runner.run("ingest", "visibility", [&] {
    return geometry::visibility_mask(out.active->cloud.positions, out.active->views, out.epsilon);
  });
}

const MaterialDictionary& pick_dictionary(const CaptureBundle& bundle, const MaterialDictionary* materials) {
  if (materials) return *materials;
  if (bundle.materials) return *bundle.materials;
  throw ConfigError("no material dictionary: the bundle has none and none was supplied");
}

PropertyReport run_stages(const CaptureBundle& bundle, const RunConfig& config, PatchEmbeddingProvider& provider,
                          const MaterialDictionary& dict, StageTimings timings, Clock::time_point start,
                          double excluded_seconds) {
  StageRunner runner(timings);
  PropertyReport report;
  report.scene_id = bundle.meta.scene_id;
  report.ground_truth_mass_kg = bundle.meta.ground_truth_mass_kg;
  report.materials = dict;

  Prepared prep;
  prepare(bundle, config, runner, prep);
  const CaptureBundle& b = *prep.active;
  const auto& cloud = b.cloud.positions;
  auto& stats = report.stats;
  stats.cloud_points = cloud.size();
  stats.views = b.views.size();
  stats.visibility_epsilon = prep.epsilon;
  stats.metric_scale_applied = prep.scaled_applied;
  stats.applied_scale = prep.scale;
  stats.visible_pairs = prep.visibility.total_visible();

  const auto semantic = runner.run("ingest", "geometric_features", [&] {
    return fusion::aggregate_geometric_features(b.cloud, b.views, prep.visibility);
  });
  stats.featureless_points = semantic.featureless_count();

  auto sources = runner.run("fusion", "sampling", [&] {
    sampling::SamplingConfig sc;
    sc.n_target = config.n_target;
    return sampling::downsample(cloud, sc);
  });
  stats.source_points = sources.size();
  stats.voxel_size = sources.voxel_size;
  stats.widen_steps = sources.widen_steps;

  const auto normals = runner.run("fusion", "normals", [&] {
    if (cloud.size() < 3) throw PreconditionError("need at least 3 points for normals");
    geometry::NormalOrientation orient;
    for (const auto& v : b.views) orient.camera_centers.push_back(v.pose.center());
    orient.visibility = &prep.visibility;
    const int k = std::min<int>(config.normal_k, static_cast<int>(cloud.size()));
    return geometry::estimate_normals(cloud, std::max(k, 3), orient);
  });
  sources.normals.clear();
  for (auto idx : sources.indices) sources.normals.push_back(normals.normals[idx]);

  const auto rankings = runner.run("fusion", "view_ranking", [&] {
    return view_select::rank_views(sources, b.views, prep.visibility, config.k_views);
  });
  for (auto flag : rankings.no_visible_view) stats.sources_without_view += flag;

  const auto requests = runner.run("fusion", "patch_planning", [&] {
    return fusion::plan_patches(sources, rankings, b.views, config.scales);
  });
  stats.patch_requests = requests.size();
  fusion::BatchStats batch;
  const auto embeddings = runner.run("fusion", "patch_embedding", [&] {
    return fusion::encode_global_batch(requests, b.views, provider, config.max_batch, &batch);
  });
  stats.provider_calls = batch.provider_calls;
  const auto fused = runner.run("fusion", "feature_fusion", [&] {
    return fusion::fuse(sources.size(), embeddings, requests);
  });

  const auto grounded = runner.run("inference", "grounding", [&] {
    grounding::TextEmbeddingCache cache;
    return grounding::ground_materials(fused, cache.get(provider, dict), config.temperature);
  });
  report.field = runner.run("inference", "densify", [&] {
    return densify::densify_field(semantic, sources, grounded, dict, config.knn_k);
  });
  report.field.normals = normals.normals;
  report.estimate = runner.run("inference", "integrate", [&] {
    integrate::IntegrationConfig ic;
    ic.lambda = config.lambda;
    ic.temperature = config.temperature;
    ic.length_mode = config.length_mode;
    return integrate::integrate_mass(report.field, dict, ic);
  });

  timings.end_to_end = seconds_since(start) - excluded_seconds;
  report.timings = std::move(timings);
  return report;
}

}  // namespace

void RunConfig::validate() const {
  if (n_target < 1) throw ConfigError("n_target must be >= 1");
  if (k_views < 1) throw ConfigError("k_views must be >= 1");
  if (scales.empty()) throw ConfigError("at least one patch scale is required");
  for (int s : scales) {
    if (s < 1) throw ConfigError("patch scales must be positive");
  }
  if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (knn_k < 1) throw ConfigError("knn_k must be >= 1");
  if (epsilon && !(*epsilon >= 0.0)) throw ConfigError("epsilon must be non-negative");
  if (max_batch < 1) throw ConfigError("max_batch must be >= 1");
  if (view_limit && *view_limit < 1) throw ConfigError("view_limit must be >= 1");
  if (normal_k < 3) throw ConfigError("normal_k must be >= 3");
}

CaptureBundle select_views(const CaptureBundle& bundle, std::size_t limit) {
  CaptureBundle out;
  out.cloud = bundle.cloud;
  out.materials = bundle.materials;
  out.meta = bundle.meta;
  const auto keep = evenly_spaced_indices(bundle.views.size(), limit);
  for (auto i : keep) out.views.push_back(bundle.views[i]);
  if (bundle.reference_poses) {
    out.reference_poses.emplace();
    for (auto i : keep) out.reference_poses->push_back((*bundle.reference_poses)[i]);
  }
  return out;
}

PropertyReport run_pipeline(const CaptureBundle& bundle, const RunConfig& config, PatchEmbeddingProvider& provider,
                            const MaterialDictionary* materials) {
  config.validate();
  const auto start = Clock::now();
  const MaterialDictionary& dict = pick_dictionary(bundle, materials);
  return run_stages(bundle, config, provider, dict, {}, start, 0.0);
}

PropertyReport run_pipeline(const std::filesystem::path& bundle_dir, const RunConfig& config,
                            PatchEmbeddingProvider& provider,
                            const std::optional<std::filesystem::path>& materials_path) {
  config.validate();
  const auto start = Clock::now();
  std::future<MaterialDictionary> pending;
  if (materials_path) pending = std::async(std::launch::async, [p = *materials_path] { return load_materials(p); });

  StageTimings timings;
  StageRunner runner(timings);
  LoadOptions options;
  options.view_limit = config.view_limit;
  const CaptureBundle bundle = runner.run("ingest", "load", [&] { return load_bundle(bundle_dir, options); });

  const auto wait_start = Clock::now();
  std::optional<MaterialDictionary> loaded;
  if (pending.valid()) {
    try {
      loaded = pending.get();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("material dictionary: ") + e.what());
    }
  }
  const double waited = seconds_since(wait_start);
  const MaterialDictionary& dict = pick_dictionary(bundle, loaded ? &*loaded : nullptr);

  RunConfig rest = config;
  rest.view_limit.reset();  // already applied while loading
  return run_stages(bundle, rest, provider, dict, std::move(timings), start, waited);
}

NaiveFusion naive_dense_fusion(const CaptureBundle& bundle, const RunConfig& config,
                               PatchEmbeddingProvider& provider) {
  config.validate();
  StageTimings untimed;
  StageRunner runner(untimed);
  Prepared prep;
  prepare(bundle, config, runner, prep);
  const CaptureBundle& b = *prep.active;
  const int scale = config.scales[config.scales.size() / 2];

  NaiveFusion out;
  const auto start = Clock::now();
  const auto requests = fusion::plan_dense_patches(b.cloud.positions, b.views, prep.visibility, scale);
  fusion::BatchStats batch;
  const auto embeddings = fusion::encode_global_batch(requests, b.views, provider, config.max_batch, &batch);
  out.features = fusion::fuse(b.cloud.size(), embeddings, requests);
  out.seconds = seconds_since(start);
  out.patches = requests.size();
  out.provider_calls = batch.provider_calls;
  return out;
}

}  // namespace physr
