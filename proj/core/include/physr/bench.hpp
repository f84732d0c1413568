#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "physr/pipeline.hpp"

namespace physr::bench {

struct LatencyStats {
  double median = 0.0;
  double p95 = 0.0;  // nearest-rank
  std::size_t samples = 0;
};

// Throws PreconditionError on an empty sample.
LatencyStats summarize(std::vector<double> samples);

struct BenchConfig {
  RunConfig run;
  int repeats = 3;
  bool naive = false;  // also time the dense reference path
};

struct BundleResult {
  std::string scene_id;
  std::size_t optimized_patches = 0;
  std::size_t naive_patches = 0;
  double optimized_fusion_seconds = 0.0;  // median over repeats
  double naive_fusion_seconds = 0.0;
  std::optional<double> predicted_mass_kg;
  std::optional<double> ground_truth_mass_kg;
};

struct BenchReport {
  // ingest, fusion, inference, total, plus every sub-stage as stage/name.
  std::map<std::string, LatencyStats> stages;
  std::vector<BundleResult> bundles;
  bool has_naive = false;
  std::size_t optimized_patches = 0;
  std::size_t naive_patches = 0;
  double patch_ratio = 0.0;      // naive / optimized patch count
  double wall_time_ratio = 0.0;  // naive / optimized fusion time
};

// Runs each bundle `repeats` times. Directory inputs are reloaded on every
// repeat so that ingest includes loading.
BenchReport run_bench(std::span<const CaptureBundle> bundles, const BenchConfig& config,
                      PatchEmbeddingProvider& provider);
BenchReport run_bench(std::span<const std::filesystem::path> bundle_dirs, const BenchConfig& config,
                      PatchEmbeddingProvider& provider);

}  // namespace physr::bench
