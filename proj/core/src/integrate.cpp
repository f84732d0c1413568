#include "physr/integrate.hpp"

#include <cmath>
#include <numbers>

#include "physr/errors.hpp"
#include "physr/parallel.hpp"
#include "physr/spatial_index.hpp"

namespace physr::integrate {

void IntegrationConfig::validate() const {
  if (!(lambda > 0.0)) throw ConfigError("integration: lambda must be positive");
  if (!(scale_factor > 0.0)) throw ConfigError("integration: scale_factor must be positive");
  if (!(temperature > 0.0)) throw ConfigError("integration: temperature must be positive");
  if (area_neighbors < 1) throw ConfigError("integration: area_neighbors must be >= 1");
}

double adaptive_voxel_side(double characteristic_length, double scale_factor, std::size_t point_count) {
  if (!(characteristic_length > 0.0)) throw PreconditionError("adaptive_voxel_side: L must be positive");
  if (!(scale_factor > 0.0)) throw PreconditionError("adaptive_voxel_side: scale_factor must be positive");
  if (point_count < 1) throw PreconditionError("adaptive_voxel_side: need at least one point");
  const double l = characteristic_length * scale_factor;
  return std::sqrt(l * l / static_cast<double>(point_count));
}

double estimate_surface_area(std::span<const Vec3f> points, int k) {
  if (k < 1) throw PreconditionError("estimate_surface_area: k must be >= 1");
  if (points.size() <= static_cast<std::size_t>(k)) {
    throw PreconditionError("estimate_surface_area: need more than k points");
  }
  const SpatialIndex grid(points);
  std::vector<double> areas(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    const Vec3 p = points[i].cast<double>();
    const auto nn = grid.nearest(p, static_cast<std::size_t>(k) + 1);
    const double r = (points[nn.back()].cast<double>() - p).norm();
    areas[i] = std::numbers::pi * r * r / k;
  });
  return pairwise_sum(areas);
}

double characteristic_length(std::span<const Vec3f> points, CharacteristicLength mode, int area_neighbors) {
  if (mode == CharacteristicLength::kLongestAxis) return bounding_box(points).extent().maxCoeff();
  return std::sqrt(estimate_surface_area(points, area_neighbors));
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

ObjectEstimate integrate_mass(const densify::PropertyField& field, const MaterialDictionary& dict,
                              const IntegrationConfig& config) {
  config.validate();
  const auto densities = grounding::property_column(dict, std::string(kDensity));
  const std::size_t n = field.size();
  const std::size_t k = dict.size();
  if (n > 0 && field.probabilities.cols() != static_cast<Eigen::Index>(k)) {
    throw PreconditionError("integrate_mass: field does not match the dictionary");
  }

  ObjectEstimate est;
  est.point_count = n;
  est.per_material.resize(k);
  for (std::size_t m = 0; m < k; ++m) est.per_material[m].name = dict.entries[m].name;
  if (n == 0) return est;

  std::vector<Vec3f> scaled(field.positions);
  if (config.scale_factor != 1.0) {
    for (auto& p : scaled) p = (p.cast<double>() * config.scale_factor).cast<float>();
  }
  est.characteristic_length = characteristic_length(field.positions, config.length_mode, config.area_neighbors);
  est.b_adap = adaptive_voxel_side(est.characteristic_length, config.scale_factor, n);
  const double cell = config.lambda * est.b_adap * est.b_adap;

  // Column m < k: per-material midpoint mass; then lo, hi, and the
  // mass-weighted position components.
  const std::size_t cols = k + 5;
  std::vector<double> parts(n * cols);
  const bool has_normals = field.normals.size() == n;
  parallel_for(n, [&](std::size_t i) {
    double* row = &parts[i * cols];
    double lo = 0.0;
    double hi = 0.0;
    double mid = 0.0;
    double thickness = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
      const double w = field.probabilities(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m));
      const double t = dict.entries[m].thickness;
      row[m] = cell * w * densities[m].mid() * t;
      mid += row[m];
      lo += cell * w * densities[m].lo * t;
      hi += cell * w * densities[m].hi * t;
      thickness += w * t;
    }
    Vec3 centre = scaled[i].cast<double>();
    if (has_normals) centre -= 0.5 * thickness * field.normals[i];
    row[k] = lo;
    row[k + 1] = hi;
    for (int d = 0; d < 3; ++d) row[k + 2 + d] = mid * centre[d];
  });

  std::vector<double> column(n);
  auto reduce = [&](std::size_t c) {
    for (std::size_t i = 0; i < n; ++i) column[i] = parts[i * cols + c];
    return pairwise_sum(column);
  };
  for (std::size_t m = 0; m < k; ++m) {
    est.per_material[m].mass_kg = reduce(m);
    est.mass_kg += est.per_material[m].mass_kg;
  }
  est.mass_range = {reduce(k), reduce(k + 1)};
  if (est.mass_kg > 0.0) {
    for (int d = 0; d < 3; ++d) est.center_of_mass[d] = reduce(k + 2 + static_cast<std::size_t>(d)) / est.mass_kg;
  }
  return est;
}

}  // namespace physr::integrate
