#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "physr/bundle.hpp"
#include "physr/geometry.hpp"

namespace physr::synth {

enum class Shape { kBox, kSphere, kCylinder };

// A hollow primitive shell. Dimensions are metric:
//   box       size = full edge lengths along local x, y, z
//   sphere    size.x() = radius
//   cylinder  size.x() = radius, size.z() = height along local z (capped)
struct Part {
  Shape shape = Shape::kBox;
  Vec3 center = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();  // local-to-world
  Vec3 size = Vec3::Ones();
  int part_id = 0;   // semantic label; several primitives may share one
  int material = 0;  // index into SyntheticScene::materials

  double surface_area() const;
};

struct SceneMaterial {
  std::string name;
  PropertyValue density;  // kg/m^3
  double thickness = 0.01;  // m
};

// Cameras on a circle around `target`, looking at it. With `alternate`, odd
// cameras sit below the target plane so that bottom faces are seen too.
struct CameraRing {
  int count = 30;
  double radius = 3.0;
  double elevation_deg = 25.0;
  bool alternate = true;
  double azimuth_offset_deg = 0.0;
  Vec3 target = Vec3::Zero();
  int width = 128;
  int height = 96;
  double fov_deg = 50.0;  // horizontal
};

enum class CloudSampling {
  kSurface,         // uniform over the analytic surface area
  kDepthUnproject,  // random valid pixels lifted with their stored depth
};

struct SyntheticScene {
  std::string scene_id = "synthetic";
  std::vector<Part> parts;
  std::vector<SceneMaterial> materials;
  CameraRing cameras;
  std::size_t point_count = 5000;
  CloudSampling sampling = CloudSampling::kSurface;
  int feature_dim = 32;
  int feature_stride = 4;  // image pixels per feature cell
  double feature_noise = 0.0;  // Gaussian sigma added to every feature value
  double depth_noise = 0.0;    // multiplicative Gaussian sigma on depth
  // The bundle is written in a reconstruction frame whose unit is
  // true_scale metres; reference poses stay metric.
  double true_scale = 1.0;
  bool random_frame = false;  // also rotate and translate the bundle frame
  bool include_reference_poses = true;
  bool include_materials = true;
  std::uint64_t seed = 0;

  // Throws ValidationError on an invalid scene.
  void validate() const;
};

struct GroundTruth {
  std::vector<std::int32_t> point_part;
  std::vector<std::int32_t> point_material;
  double mass_kg = 0.0;  // sum of area * thickness * density midpoint
  std::vector<double> part_mass_kg;  // per primitive
  geometry::Sim3Transform to_metric;  // bundle frame -> metric frame
  std::vector<CameraPose> metric_poses;
};

struct SyntheticCapture {
  CaptureBundle bundle;
  GroundTruth truth;
};

// Fully deterministic for a given scene.
SyntheticCapture generate(const SyntheticScene& scene);

struct Hit {
  double t = 0.0;  // ray parameter
  int primitive = -1;
};

// Nearest intersection with t > 0 of origin + t * direction, metric frame.
std::optional<Hit> raycast(const SyntheticScene& scene, const Vec3& origin, const Vec3& direction);

Intrinsics ring_intrinsics(const CameraRing& ring);
std::vector<CameraPose> metric_camera_poses(const SyntheticScene& scene);
geometry::Sim3Transform bundle_to_metric(const SyntheticScene& scene);

// Depth stored in the bundle for pixel (x, y) of view `view`, noise-free;
// 0 when the ray misses every part.
float rendered_depth(const SyntheticScene& scene, std::size_t view, int x, int y);

// Exact occlusion test for bundle-frame points against view `view`: the
// point must project inside the image, and its camera depth must not exceed
// the analytic first-hit depth through its nearest pixel centre (as stored).
std::vector<std::uint8_t> visibility_oracle(const SyntheticScene& scene, std::span<const Vec3f> points,
                                            std::size_t view);

// Mean-colour provider palette entry for each material, as painted.
Rgb8 material_rgb(const SceneMaterial& material);

namespace scenes {

// Hollow unit cube centred at the origin, one material.
SyntheticScene unit_box(double density = 1000.0, double thickness = 0.01, std::uint64_t seed = 0);
SyntheticScene sphere(double radius, double density = 1000.0, double thickness = 0.01, std::uint64_t seed = 0);
// Two boxes with random sizes, one behind the other along a random axis.
SyntheticScene occlusion_pair(std::uint64_t seed);
// Wooden top on four metal legs.
SyntheticScene table(std::uint64_t seed = 0);
// Checkerboard of separated cubes; alternate cubes form part 0 and part 1.
SyntheticScene interleaved(std::uint64_t seed = 0);
// Two to four random primitives in one to three materials.
SyntheticScene random_object(std::uint64_t seed);

}  // namespace scenes
}  // namespace physr::synth
