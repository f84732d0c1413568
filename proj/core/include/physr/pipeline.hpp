#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "physr/bundle.hpp"
#include "physr/densify.hpp"
#include "physr/integrate.hpp"
#include "physr/providers.hpp"

namespace physr {

struct RunConfig {
  int n_target = 150;
  int k_views = 3;
  std::vector<int> scales{20, 40, 60};  // patch side lengths, pixels
  double temperature = 0.1;
  double lambda = 0.6;
  int knn_k = 5;
  std::optional<double> epsilon;  // visibility slack; default 1% of the cloud diagonal
  std::size_t max_batch = 1024;
  std::optional<std::size_t> view_limit;
  int normal_k = 16;
  bool metric_scale = true;  // align to reference poses when present
  integrate::CharacteristicLength length_mode = integrate::CharacteristicLength::kSurfaceArea;

  // Throws ConfigError unless every numeric knob is positive.
  void validate() const;
};

struct SubStage {
  std::string stage;  // ingest | fusion | inference
  std::string name;
  double seconds = 0.0;
};

struct StageTimings {
  double ingest = 0.0;     // load + scale + visibility + geometric-feature aggregation
  double fusion = 0.0;     // sampling + normals + view ranking + patch embedding + fusion
  double inference = 0.0;  // grounding + densify + integrate
  double end_to_end = 0.0; // wall time of the whole run, dictionary wait excluded
  std::vector<SubStage> detail;

  double total() const { return ingest + fusion + inference; }
};

struct PipelineStats {
  std::size_t cloud_points = 0;
  std::size_t views = 0;
  std::size_t featureless_points = 0;
  std::size_t source_points = 0;
  double voxel_size = 0.0;
  int widen_steps = 0;
  std::size_t sources_without_view = 0;
  std::size_t patch_requests = 0;
  std::size_t provider_calls = 0;
  std::size_t visible_pairs = 0;
  double visibility_epsilon = 0.0;
  bool metric_scale_applied = false;
  double applied_scale = 1.0;
};

struct PropertyReport {
  std::string scene_id;
  std::optional<double> ground_truth_mass_kg;
  MaterialDictionary materials;
  densify::PropertyField field;
  integrate::ObjectEstimate estimate;
  StageTimings timings;
  PipelineStats stats;
};

// Runs ingest, semantic fusion and physical inference on an in-memory
// bundle. `materials` overrides the bundle's dictionary. Throws ConfigError
// before any work when no dictionary is available, and StageError naming
// the stage for failures inside it.
PropertyReport run_pipeline(const CaptureBundle& bundle, const RunConfig& config, PatchEmbeddingProvider& provider,
                            const MaterialDictionary* materials = nullptr);

// Same, loading the bundle inside the ingest stage. A separate dictionary
// file is read concurrently and its wait is excluded from the timings.
PropertyReport run_pipeline(const std::filesystem::path& bundle_dir, const RunConfig& config,
                            PatchEmbeddingProvider& provider,
                            const std::optional<std::filesystem::path>& materials_path = std::nullopt);

// Evenly spaced view subset (reference poses follow their views).
CaptureBundle select_views(const CaptureBundle& bundle, std::size_t limit);

struct NaiveFusion {
  std::size_t patches = 0;
  std::size_t provider_calls = 0;
  double seconds = 0.0;  // patch planning + embedding + fusion
  fusion::FusedFeatures features;  // one row per cloud point
};

// Reference workload: every cloud point in every view that sees it, at the
// middle patch scale, no sampling or view ranking. Scale alignment and
// visibility are computed first and not timed.
NaiveFusion naive_dense_fusion(const CaptureBundle& bundle, const RunConfig& config,
                               PatchEmbeddingProvider& provider);

}  // namespace physr
