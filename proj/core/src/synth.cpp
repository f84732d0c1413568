#include "physr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "physr/errors.hpp"
#include "physr/parallel.hpp"
#include "physr/providers.hpp"

namespace physr::synth {
namespace {

constexpr double kMinT = 1e-9;
constexpr double kPi = std::numbers::pi;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::optional<double> intersect_box(const Vec3& o, const Vec3& d, const Vec3& half) {
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (std::abs(o[a]) > half[a]) return std::nullopt;
      continue;
    }
    double ta = (-half[a] - o[a]) / d[a];
    double tb = (half[a] - o[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t1 < t0) return std::nullopt;
  if (t0 > kMinT) return t0;
  if (t1 > kMinT) return t1;
  return std::nullopt;
}

std::optional<double> intersect_sphere(const Vec3& o, const Vec3& d, double r) {
  const double a = d.squaredNorm();
  const double b = 2.0 * d.dot(o);
  const double c = o.squaredNorm() - r * r;
  const double disc = b * b - 4 * a * c;
  if (disc < 0) return std::nullopt;
  const double root = std::sqrt(disc);
  const double t0 = (-b - root) / (2 * a);
  if (t0 > kMinT) return t0;
  const double t1 = (-b + root) / (2 * a);
  if (t1 > kMinT) return t1;
  return std::nullopt;
}

std::optional<double> intersect_cylinder(const Vec3& o, const Vec3& d, double r, double half_h) {
  std::optional<double> best;
  auto consider = [&](double t) {
    if (t > kMinT && (!best || t < *best)) best = t;
  };
  const double a = d.x() * d.x() + d.y() * d.y();
  if (a > 0.0) {
    const double b = 2.0 * (o.x() * d.x() + o.y() * d.y());
    const double c = o.x() * o.x() + o.y() * o.y() - r * r;
    const double disc = b * b - 4 * a * c;
    if (disc >= 0) {
      const double root = std::sqrt(disc);
      for (double t : {(-b - root) / (2 * a), (-b + root) / (2 * a)}) {
        if (std::abs(o.z() + t * d.z()) <= half_h) consider(t);
      }
    }
  }
  if (d.z() != 0.0) {
    for (double h : {-half_h, half_h}) {
      const double t = (h - o.z()) / d.z();
      const double x = o.x() + t * d.x();
      const double y = o.y() + t * d.y();
      if (x * x + y * y <= r * r) consider(t);
    }
  }
  return best;
}

std::optional<double> intersect(const Part& part, const Vec3& origin, const Vec3& dir) {
  const Vec3 o = part.rotation.transpose() * (origin - part.center);
  const Vec3 d = part.rotation.transpose() * dir;
  switch (part.shape) {
    case Shape::kBox: return intersect_box(o, d, 0.5 * part.size);
    case Shape::kSphere: return intersect_sphere(o, d, part.size.x());
    case Shape::kCylinder: return intersect_cylinder(o, d, part.size.x(), 0.5 * part.size.z());
  }
  return std::nullopt;
}

// Uniform point on a part's surface, world frame.
Vec3 sample_surface(const Part& part, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Vec3 local;
  switch (part.shape) {
    case Shape::kBox: {
      const Vec3 h = 0.5 * part.size;
      const double areas[3] = {h.y() * h.z(), h.x() * h.z(), h.x() * h.y()};
      const double pick = uni(rng) * (areas[0] + areas[1] + areas[2]);
      const int axis = pick < areas[0] ? 0 : (pick < areas[0] + areas[1] ? 1 : 2);
      const double sign = uni(rng) < 0.5 ? -1.0 : 1.0;
      for (int a = 0; a < 3; ++a) local[a] = (2.0 * uni(rng) - 1.0) * h[a];
      local[axis] = sign * h[axis];
      break;
    }
    case Shape::kSphere: {
      std::normal_distribution<double> normal(0.0, 1.0);
      Vec3 v;
      do {
        v = Vec3(normal(rng), normal(rng), normal(rng));
      } while (v.norm() < 1e-12);
      local = part.size.x() * v.normalized();
      break;
    }
    case Shape::kCylinder: {
      const double r = part.size.x();
      const double h = part.size.z();
      const double lateral = 2 * kPi * r * h;
      const double cap = kPi * r * r;
      const double pick = uni(rng) * (lateral + 2 * cap);
      const double phi = 2 * kPi * uni(rng);
      if (pick < lateral) {
        local = Vec3(r * std::cos(phi), r * std::sin(phi), (uni(rng) - 0.5) * h);
      } else {
        const double rho = r * std::sqrt(uni(rng));
        local = Vec3(rho * std::cos(phi), rho * std::sin(phi), pick < lateral + cap ? -0.5 * h : 0.5 * h);
      }
      break;
    }
  }
  return part.rotation * local + part.center;
}

// Camera-frame ray through image point (u, v) with unit z component, so
// the hit parameter is the z-depth.
Vec3 pixel_ray(const Intrinsics& k, const CameraPose& pose, double u, double v) {
  return pose.rotation.transpose() * Vec3((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
}

float store_depth(double metric_depth, double true_scale) {
  return static_cast<float>(metric_depth / true_scale);
}

std::vector<float> part_embedding(const SyntheticScene& scene, int part_id) {
  const auto dim = static_cast<std::size_t>(scene.feature_dim);
  std::vector<float> e(dim, 0.0F);
  int max_id = 0;
  for (const auto& p : scene.parts) max_id = std::max(max_id, p.part_id);
  if (max_id < scene.feature_dim) {
    e[static_cast<std::size_t>(part_id)] = 1.0F;
    return e;
  }
  std::mt19937_64 rng(mix_seed(scene.seed, 1000 + static_cast<std::uint64_t>(part_id)));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  double n = 0.0;
  for (auto& x : v) {
    x = normal(rng);
    n += x * x;
  }
  n = std::sqrt(n);
  for (std::size_t i = 0; i < dim; ++i) e[i] = static_cast<float>(v[i] / n);
  return e;
}

CameraPose to_bundle_pose(const CameraPose& metric, const geometry::Sim3Transform& to_metric) {
  CameraPose pose;
  pose.rotation = metric.rotation * to_metric.rotation;
  pose.translation = (metric.rotation * to_metric.translation + metric.translation) / to_metric.scale;
  return pose;
}

struct RenderedView {
  ViewRecord view;
  std::vector<std::int32_t> pixel_primitive;  // -1 where background
};

RenderedView render_view(const SyntheticScene& scene, std::size_t v, const CameraPose& metric_pose,
                         const CameraPose& bundle_pose, const Intrinsics& k) {
  const int w = scene.cameras.width;
  const int h = scene.cameras.height;
  RenderedView out;
  out.view.intrinsics = k;
  out.view.pose = bundle_pose;
  out.view.image = Image(w, h);
  out.view.depth = DepthMap(w, h);
  out.pixel_primitive.assign(static_cast<std::size_t>(w) * h, -1);
  const Vec3 origin = metric_pose.center();

  std::mt19937_64 depth_rng(mix_seed(scene.seed, 2 * v + 1));
  std::normal_distribution<double> depth_noise(0.0, scene.depth_noise > 0 ? scene.depth_noise : 1.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto hit = raycast(scene, origin, pixel_ray(k, metric_pose, x, y));
      if (!hit) continue;
      const Part& part = scene.parts[static_cast<std::size_t>(hit->primitive)];
      double depth = hit->t;
      if (scene.depth_noise > 0) depth *= 1.0 + depth_noise(depth_rng);
      out.view.depth.at(x, y) = depth > 0 ? store_depth(depth, scene.true_scale) : 0.0F;
      const Rgb8 c = material_rgb(scene.materials[static_cast<std::size_t>(part.material)]);
      std::copy(c.begin(), c.end(), out.view.image.pixel(x, y));
      out.pixel_primitive[static_cast<std::size_t>(y) * w + x] = hit->primitive;
    }
  }

  const int stride = std::max(1, scene.feature_stride);
  const int fw = std::max(1, w / stride);
  const int fh = std::max(1, h / stride);
  out.view.features = FeatureMap(fh, fw, scene.feature_dim);
  std::mt19937_64 feature_rng(mix_seed(scene.seed, 2 * v + 2));
  std::normal_distribution<double> feature_noise(0.0, scene.feature_noise > 0 ? scene.feature_noise : 1.0);
  for (int fy = 0; fy < fh; ++fy) {
    for (int fx = 0; fx < fw; ++fx) {
      const double u = (fx + 0.5) * w / fw - 0.5;
      const double vv = (fy + 0.5) * h / fh - 0.5;
      auto cell = out.view.features.cell(fx, fy);
      const auto hit = raycast(scene, origin, pixel_ray(k, metric_pose, u, vv));
      if (hit) {
        const auto e = part_embedding(scene, scene.parts[static_cast<std::size_t>(hit->primitive)].part_id);
        std::copy(e.begin(), e.end(), cell.begin());
      }
      if (scene.feature_noise > 0) {
        for (auto& c : cell) c = static_cast<float>(c + feature_noise(feature_rng));
      }
    }
  }
  return out;
}

}  // namespace

double Part::surface_area() const {
  switch (shape) {
    case Shape::kBox: return 2.0 * (size.x() * size.y() + size.y() * size.z() + size.x() * size.z());
    case Shape::kSphere: return 4.0 * kPi * size.x() * size.x();
    case Shape::kCylinder: return 2.0 * kPi * size.x() * size.z() + 2.0 * kPi * size.x() * size.x();
  }
  return 0.0;
}

void SyntheticScene::validate() const {
  if (parts.empty()) throw ValidationError("synthetic scene: no parts");
  if (materials.empty()) throw ValidationError("synthetic scene: no materials");
  for (const auto& p : parts) {
    const bool ok = p.shape == Shape::kBox       ? (p.size.array() > 0).all()
                    : p.shape == Shape::kSphere ? p.size.x() > 0
                                                : p.size.x() > 0 && p.size.z() > 0;
    if (!ok) throw ValidationError("synthetic scene: degenerate part dimensions");
    if (p.material < 0 || static_cast<std::size_t>(p.material) >= materials.size()) {
      throw ValidationError("synthetic scene: part references a missing material");
    }
    if (p.part_id < 0) throw ValidationError("synthetic scene: negative part id");
    if (!is_rotation(p.rotation)) throw ValidationError("synthetic scene: part rotation is not orthonormal");
  }
  for (const auto& m : materials) {
    if (!(m.thickness > 0) || !(m.density.lo > 0) || m.density.hi < m.density.lo) {
      throw ValidationError("synthetic scene: material '" + m.name + "' needs positive thickness and density");
    }
  }
  if (cameras.count < 1) throw ValidationError("synthetic scene: need at least one camera");
  if (cameras.width < 1 || cameras.height < 1) throw ValidationError("synthetic scene: empty image size");
  if (!(cameras.radius > 0) || !(cameras.fov_deg > 0 && cameras.fov_deg < 180)) {
    throw ValidationError("synthetic scene: invalid camera ring");
  }
  if (point_count < 1) throw ValidationError("synthetic scene: point_count must be positive");
  if (feature_dim < 1) throw ValidationError("synthetic scene: feature_dim must be positive");
  if (!(true_scale > 0)) throw ValidationError("synthetic scene: true_scale must be positive");
  if (feature_noise < 0 || depth_noise < 0) throw ValidationError("synthetic scene: negative noise");
}

std::optional<Hit> raycast(const SyntheticScene& scene, const Vec3& origin, const Vec3& direction) {
  std::optional<Hit> best;
  for (std::size_t i = 0; i < scene.parts.size(); ++i) {
    const auto t = intersect(scene.parts[i], origin, direction);
    if (t && (!best || *t < best->t)) best = Hit{*t, static_cast<int>(i)};
  }
  return best;
}

Intrinsics ring_intrinsics(const CameraRing& ring) {
  Intrinsics k;
  k.fx = 0.5 * ring.width / std::tan(0.5 * ring.fov_deg * kPi / 180.0);
  k.fy = k.fx;
  k.cx = 0.5 * (ring.width - 1);
  k.cy = 0.5 * (ring.height - 1);
  return k;
}

std::vector<CameraPose> metric_camera_poses(const SyntheticScene& scene) {
  const auto& ring = scene.cameras;
  std::vector<CameraPose> poses;
  for (int i = 0; i < ring.count; ++i) {
    const double az = 2 * kPi * i / ring.count + ring.azimuth_offset_deg * kPi / 180.0;
    const double el = (ring.alternate && i % 2 == 1 ? -1.0 : 1.0) * ring.elevation_deg * kPi / 180.0;
    const Vec3 eye = ring.target + ring.radius * Vec3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az),
                                                      std::sin(el));
    poses.push_back(look_at(eye, ring.target));
  }
  return poses;
}

geometry::Sim3Transform bundle_to_metric(const SyntheticScene& scene) {
  geometry::Sim3Transform t;
  t.scale = scene.true_scale;
  if (scene.random_frame) {
    std::mt19937_64 rng(mix_seed(scene.seed, 7));
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
    t.rotation = q.normalized().toRotationMatrix();
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    t.translation = Vec3(uni(rng), uni(rng), uni(rng));
  }
  return t;
}

Rgb8 material_rgb(const SceneMaterial& material) { return MeanColorProvider::material_color(material.name); }

float rendered_depth(const SyntheticScene& scene, std::size_t view, int x, int y) {
  const auto poses = metric_camera_poses(scene);
  const Intrinsics k = ring_intrinsics(scene.cameras);
  const auto hit = raycast(scene, poses.at(view).center(), pixel_ray(k, poses.at(view), x, y));
  return hit ? store_depth(hit->t, scene.true_scale) : 0.0F;
}

std::vector<std::uint8_t> visibility_oracle(const SyntheticScene& scene, std::span<const Vec3f> points,
                                            std::size_t view) {
  const auto metric = metric_camera_poses(scene);
  const CameraPose& metric_pose = metric.at(view);
  const CameraPose pose = to_bundle_pose(metric_pose, bundle_to_metric(scene));
  const Intrinsics k = ring_intrinsics(scene.cameras);
  const Vec3 origin = metric_pose.center();
  const int w = scene.cameras.width;
  const int h = scene.cameras.height;

  std::vector<std::uint8_t> out(points.size(), 0);
  parallel_for(points.size(), [&](std::size_t i) {
    const Vec3 c = pose.to_camera(points[i].cast<double>());
    if (!(c.z() > 0.0)) return;
    const double u = k.fx * c.x() / c.z() + k.cx;
    const double v = k.fy * c.y() / c.z() + k.cy;
    const double px = std::floor(u + 0.5);
    const double py = std::floor(v + 0.5);
    if (px < 0 || py < 0 || px >= w || py >= h) return;
    const auto hit = raycast(scene, origin, pixel_ray(k, metric_pose, px, py));
    if (!hit) return;
    const float stored = store_depth(hit->t, scene.true_scale);
    out[i] = stored > 0.0F && c.z() <= static_cast<double>(stored) ? 1 : 0;
  });
  return out;
}

SyntheticCapture generate(const SyntheticScene& scene) {
  scene.validate();
  SyntheticCapture out;
  CaptureBundle& bundle = out.bundle;
  GroundTruth& truth = out.truth;

  truth.to_metric = bundle_to_metric(scene);
  truth.metric_poses = metric_camera_poses(scene);
  const geometry::Sim3Transform to_bundle = truth.to_metric.inverse();
  const Intrinsics k = ring_intrinsics(scene.cameras);
  const std::size_t nviews = truth.metric_poses.size();

  std::vector<RenderedView> rendered(nviews);
  parallel_for(
      nviews,
      [&](std::size_t v) {
        rendered[v] = render_view(scene, v, truth.metric_poses[v], to_bundle_pose(truth.metric_poses[v], truth.to_metric),
                                  k);
      },
      1);

  for (const auto& p : scene.parts) {
    const auto& m = scene.materials[static_cast<std::size_t>(p.material)];
    truth.part_mass_kg.push_back(p.surface_area() * m.thickness * m.density.mid());
    truth.mass_kg += truth.part_mass_kg.back();
  }

  std::mt19937_64 rng(mix_seed(scene.seed, 0));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto add_point = [&](const Vec3& bundle_point, int primitive) {
    const Part& part = scene.parts[static_cast<std::size_t>(primitive)];
    bundle.cloud.positions.push_back(bundle_point.cast<float>());
    bundle.cloud.colors.push_back(material_rgb(scene.materials[static_cast<std::size_t>(part.material)]));
    truth.point_part.push_back(part.part_id);
    truth.point_material.push_back(part.material);
  };

  if (scene.sampling == CloudSampling::kSurface) {
    std::vector<double> cdf;
    double total = 0.0;
    for (const auto& p : scene.parts) cdf.push_back(total += p.surface_area());
    for (std::size_t i = 0; i < scene.point_count; ++i) {
      const double pick = uni(rng) * total;
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), pick);
      const auto primitive = static_cast<int>(std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1));
      add_point(to_bundle.apply(sample_surface(scene.parts[static_cast<std::size_t>(primitive)], rng)), primitive);
    }
  } else {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> valid;  // (view, pixel)
    for (std::size_t v = 0; v < nviews; ++v) {
      for (std::size_t p = 0; p < rendered[v].pixel_primitive.size(); ++p) {
        if (rendered[v].pixel_primitive[p] >= 0) valid.emplace_back(v, p);
      }
    }
    if (valid.empty()) throw ValidationError("synthetic scene: no camera sees any part");
    const int w = scene.cameras.width;
    for (std::size_t i = 0; i < scene.point_count; ++i) {
      const auto [v, p] = valid[static_cast<std::size_t>(uni(rng) * valid.size()) % valid.size()];
      const ViewRecord& view = rendered[v].view;
      const int x = static_cast<int>(p % static_cast<std::size_t>(w));
      const int y = static_cast<int>(p / static_cast<std::size_t>(w));
      const double d = view.depth.at(x, y);
      add_point(geometry::unproject(Vec2(x, y), d, view.intrinsics, view.pose), rendered[v].pixel_primitive[p]);
    }
  }

  for (auto& r : rendered) bundle.views.push_back(std::move(r.view));
  if (scene.include_reference_poses) bundle.reference_poses = truth.metric_poses;
  if (scene.include_materials) {
    MaterialDictionary dict;
    dict.source = "file";
    for (const auto& m : scene.materials) {
      MaterialEntry e;
      e.name = m.name;
      e.thickness = m.thickness;
      e.properties[std::string(kDensity)] = m.density;
      dict.entries.push_back(std::move(e));
    }
    bundle.materials = std::move(dict);
  }
  bundle.meta.scene_id = scene.scene_id;
  bundle.meta.ground_truth_mass_kg = truth.mass_kg;
  return out;
}

namespace scenes {
namespace {

SceneMaterial material(const std::string& name, double density, double thickness) {
  return {name, PropertyValue::scalar(density), thickness};
}

Part box(const Vec3& center, const Vec3& size, int part_id, int material_index) {
  Part p;
  p.shape = Shape::kBox;
  p.center = center;
  p.size = size;
  p.part_id = part_id;
  p.material = material_index;
  return p;
}

}  // namespace

SyntheticScene unit_box(double density, double thickness, std::uint64_t seed) {
  SyntheticScene s;
  s.scene_id = "unit_box";
  s.seed = seed;
  s.materials = {material("ceramic", density, thickness)};
  s.parts = {box(Vec3::Zero(), Vec3::Ones(), 0, 0)};
  return s;
}

SyntheticScene sphere(double radius, double density, double thickness, std::uint64_t seed) {
  SyntheticScene s;
  s.scene_id = "sphere";
  s.seed = seed;
  s.materials = {material("ceramic", density, thickness)};
  Part p;
  p.shape = Shape::kSphere;
  p.size = Vec3(radius, radius, radius);
  s.parts = {p};
  s.cameras.radius = 3.0 * radius / 0.5;
  return s;
}

SyntheticScene occlusion_pair(std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, 11));
  std::uniform_real_distribution<double> size(0.25, 0.6);
  std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
  SyntheticScene s;
  s.scene_id = "occlusion_" + std::to_string(seed);
  s.seed = seed;
  s.materials = {material("wood", 700, 0.01), material("metal", 7800, 0.002)};
  const double a = angle(rng);
  const Vec3 axis(std::cos(a), std::sin(a), 0.0);
  s.parts = {box(-0.45 * axis, Vec3(size(rng), size(rng), size(rng)), 0, 0),
             box(0.45 * axis, Vec3(size(rng), size(rng), size(rng)), 1, 1)};
  s.cameras.count = 12;
  s.cameras.width = 96;
  s.cameras.height = 72;
  s.point_count = 3000;
  s.feature_dim = 8;
  return s;
}

SyntheticScene table(std::uint64_t seed) {
  SyntheticScene s;
  s.scene_id = "table";
  s.seed = seed;
  s.materials = {material("wood", 700, 0.02), material("metal", 7800, 0.002)};
  s.parts.push_back(box(Vec3(0, 0, 0.35), Vec3(1.2, 0.7, 0.05), 0, 0));
  for (double x : {-0.5, 0.5}) {
    for (double y : {-0.25, 0.25}) {
      Part leg;
      leg.shape = Shape::kCylinder;
      leg.center = Vec3(x, y, -0.02);
      leg.size = Vec3(0.03, 0.03, 0.69);
      leg.part_id = 1;
      leg.material = 1;
      s.parts.push_back(leg);
    }
  }
  return s;
}

SyntheticScene interleaved(std::uint64_t seed) {
  SyntheticScene s;
  s.scene_id = "interleaved";
  s.seed = seed;
  s.materials = {material("wood", 700, 0.01), material("metal", 7800, 0.002)};
  const double side = 0.12;
  const double pitch = 0.2;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const int part = (i + j) % 2;
      s.parts.push_back(box(Vec3((i - 1.5) * pitch, (j - 1.5) * pitch, 0.0), Vec3(side, side, side), part, part));
    }
  }
  s.cameras.elevation_deg = 50.0;
  s.cameras.radius = 2.5;
  s.feature_stride = 1;
  s.feature_dim = 8;
  s.point_count = 6000;
  return s;
}

SyntheticScene random_object(std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, 13));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  SyntheticScene s;
  s.scene_id = "object_" + std::to_string(seed);
  s.seed = seed;
  const SceneMaterial palette[] = {material("wood", 700, 0.015), material("metal", 7800, 0.002),
                                   material("rubber", 1100, 0.005), material("fabric", 300, 0.003)};
  const int nmat = 1 + static_cast<int>(uni(rng) * 3) % 3;
  for (int m = 0; m < nmat; ++m) s.materials.push_back(palette[(seed + static_cast<std::uint64_t>(m)) % 4]);
  const int nparts = 2 + static_cast<int>(uni(rng) * 3) % 3;
  for (int i = 0; i < nparts; ++i) {
    Part p;
    const double kind = uni(rng);
    p.shape = kind < 0.5 ? Shape::kBox : (kind < 0.75 ? Shape::kSphere : Shape::kCylinder);
    p.size = Vec3(0.15 + 0.35 * uni(rng), 0.15 + 0.35 * uni(rng), 0.15 + 0.35 * uni(rng));
    if (p.shape != Shape::kBox) p.size.x() *= 0.5;
    const double a = 2 * kPi * i / nparts;
    p.center = Vec3(0.45 * std::cos(a), 0.45 * std::sin(a), 0.2 * (uni(rng) - 0.5));
    p.part_id = i;
    p.material = i % nmat;
    s.parts.push_back(p);
  }
  s.feature_dim = 8;
  return s;
}

}  // namespace scenes
}  // namespace physr::synth
