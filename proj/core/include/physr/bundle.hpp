#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "physr/materials.hpp"
#include "physr/types.hpp"

namespace physr {

struct BundleMeta {
  std::string scene_id;
  std::optional<double> ground_truth_mass_kg;

  bool operator==(const BundleMeta&) const = default;
};

// Posed multi-view capture plus everything the external reconstruction and
// encoder stage produced. Immutable after loading; safe to share across
// worker threads.
struct CaptureBundle {
  std::vector<ViewRecord> views;
  PointCloud cloud;
  std::optional<std::vector<CameraPose>> reference_poses;
  std::optional<MaterialDictionary> materials;
  BundleMeta meta;

  bool operator==(const CaptureBundle&) const = default;
};

struct LoadOptions {
  // Keep at most this many views, evenly spaced over the manifest order.
  std::optional<std::size_t> view_limit;
};

// Rotation tolerance shared by pose validation and Sim(3) checks.
inline constexpr double kRotationTolerance = 1e-6;

bool is_rotation(const Mat3& r, double tol = kRotationTolerance);

// Enforces every bundle invariant; throws StructuralError or ValidationError.
void validate(const CaptureBundle& bundle);

// Directory layout:
//   manifest                 JSON: scene metadata, per-view cameras and shapes
//   views/<i>/image.png      8-bit RGB
//   views/<i>/depth.f32      tensor blob [H, W], z-depth in metres, 0 = invalid
//   views/<i>/feat.f32       tensor blob [Hf, Wf, D]
//   cloud.ply                binary little-endian PLY
//   materials.json           optional material dictionary
//   ref_poses.json           optional metric reference poses, one per view
CaptureBundle load_bundle(const std::filesystem::path& dir, const LoadOptions& options = {});
void save_bundle(const CaptureBundle& bundle, const std::filesystem::path& dir);

// Indices of `limit` views spread evenly over [0, count), in increasing order.
std::vector<std::size_t> evenly_spaced_indices(std::size_t count, std::size_t limit);

}  // namespace physr
