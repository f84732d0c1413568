#pragma once

#include <span>
#include <string>
#include <vector>

#include "physr/densify.hpp"

namespace physr::integrate {

enum class CharacteristicLength {
  // sqrt of the surface area estimated from nearest-neighbour spacing, so
  // that N * b_adap^2 equals the sampled area.
  kSurfaceArea,
  // Longest axis of the bounding box.
  kLongestAxis,
};

struct IntegrationConfig {
  double lambda = 0.6;
  double scale_factor = 1.0;  // multiplies positions and lengths
  double temperature = 0.1;   // kept for reporting; weights arrive densified
  CharacteristicLength length_mode = CharacteristicLength::kSurfaceArea;
  int area_neighbors = 8;

  void validate() const;
};

// sqrt((L * scale_factor)^2 / N). Requires L > 0, scale_factor > 0, N >= 1.
double adaptive_voxel_side(double characteristic_length, double scale_factor, std::size_t point_count);

// Sum over points of pi * r_k^2 / k, r_k the distance to the k-th nearest
// other point. Unbiased for uniformly sampled surfaces.
double estimate_surface_area(std::span<const Vec3f> points, int k = 8);

double characteristic_length(std::span<const Vec3f> points, CharacteristicLength mode, int area_neighbors = 8);

// Deterministic pairwise-tree sum.
double pairwise_sum(std::span<const double> values);

struct MaterialContribution {
  std::string name;
  double mass_kg = 0.0;
};

struct ObjectEstimate {
  double mass_kg = 0.0;  // from range midpoints; equals the sum of contributions
  PropertyValue mass_range;
  Vec3 center_of_mass = Vec3::Zero();
  std::vector<MaterialContribution> per_material;
  double b_adap = 0.0;
  double characteristic_length = 0.0;
  std::size_t point_count = 0;
};

// lambda * b_adap^2 * sum_i sum_k w_ik density_k thickness_k. Throws
// ValidationError when an entry lacks a density.
ObjectEstimate integrate_mass(const densify::PropertyField& field, const MaterialDictionary& dict,
                              const IntegrationConfig& config = {});

}  // namespace physr::integrate
