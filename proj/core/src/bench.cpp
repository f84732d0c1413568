#include "physr/bench.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "physr/errors.hpp"

namespace physr::bench {
namespace {

using RunFn = std::function<PropertyReport()>;
using NaiveFn = std::function<NaiveFusion()>;

BenchReport collect(std::size_t count, const BenchConfig& config, const std::function<RunFn(std::size_t)>& runner,
                    const std::function<NaiveFn(std::size_t)>& naive) {
  if (count == 0) throw PreconditionError("bench: need at least one bundle");
  if (config.repeats < 1) throw ConfigError("bench: repeats must be >= 1");
  std::map<std::string, std::vector<double>> samples;
  BenchReport report;
  report.has_naive = config.naive;
  for (std::size_t b = 0; b < count; ++b) {
    BundleResult result;
    std::vector<double> fusion_times;
    for (int r = 0; r < config.repeats; ++r) {
      const PropertyReport run = runner(b)();
      const auto& t = run.timings;
      samples["ingest"].push_back(t.ingest);
      samples["fusion"].push_back(t.fusion);
      samples["inference"].push_back(t.inference);
      samples["total"].push_back(t.total());
      std::map<std::string, double> steps;
      for (const auto& s : t.detail) steps[s.stage + "/" + s.name] += s.seconds;
      for (const auto& [name, secs] : steps) samples[name].push_back(secs);
      fusion_times.push_back(t.fusion);
      if (r == 0) {
        result.scene_id = run.scene_id;
        result.optimized_patches = run.stats.patch_requests;
        result.predicted_mass_kg = run.estimate.mass_kg;
        result.ground_truth_mass_kg = run.ground_truth_mass_kg;
      } else if (run.stats.patch_requests != result.optimized_patches) {
        throw Error("bench: patch count changed between repeats of " + result.scene_id);
      }
    }
    result.optimized_fusion_seconds = summarize(fusion_times).median;
    if (config.naive) {
      std::vector<double> naive_times;
      for (int r = 0; r < config.repeats; ++r) {
        const NaiveFusion n = naive(b)();
        naive_times.push_back(n.seconds);
        result.naive_patches = n.patches;
      }
      result.naive_fusion_seconds = summarize(naive_times).median;
    }
    report.optimized_patches += result.optimized_patches;
    report.naive_patches += result.naive_patches;
    report.bundles.push_back(std::move(result));
  }
  for (auto& [name, values] : samples) report.stages[name] = summarize(std::move(values));
  if (config.naive && report.optimized_patches > 0) {
    report.patch_ratio = static_cast<double>(report.naive_patches) / static_cast<double>(report.optimized_patches);
    double naive_s = 0.0;
    double opt_s = 0.0;
    for (const auto& r : report.bundles) {
      naive_s += r.naive_fusion_seconds;
      opt_s += r.optimized_fusion_seconds;
    }
    report.wall_time_ratio = opt_s > 0.0 ? naive_s / opt_s : 0.0;
  }
  return report;
}

}  // namespace

LatencyStats summarize(std::vector<double> samples) {
  if (samples.empty()) throw PreconditionError("summarize: no samples");
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  LatencyStats s;
  s.samples = n;
  s.median = n % 2 == 1 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  s.p95 = samples[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

BenchReport run_bench(std::span<const CaptureBundle> bundles, const BenchConfig& config,
                      PatchEmbeddingProvider& provider) {
  return collect(
      bundles.size(), config,
      [&](std::size_t b) -> RunFn { return [&, b] { return run_pipeline(bundles[b], config.run, provider); }; },
      [&](std::size_t b) -> NaiveFn { return [&, b] { return naive_dense_fusion(bundles[b], config.run, provider); }; });
}

BenchReport run_bench(std::span<const std::filesystem::path> bundle_dirs, const BenchConfig& config,
                      PatchEmbeddingProvider& provider) {
  return collect(
      bundle_dirs.size(), config,
      [&](std::size_t b) -> RunFn { return [&, b] { return run_pipeline(bundle_dirs[b], config.run, provider); }; },
      [&](std::size_t b) -> NaiveFn {
        return [&, b] {
          LoadOptions options;
          options.view_limit = config.run.view_limit;
          RunConfig rest = config.run;
          rest.view_limit.reset();
          return naive_dense_fusion(load_bundle(bundle_dirs[b], options), rest, provider);
        };
      });
}

}  // namespace physr::bench
