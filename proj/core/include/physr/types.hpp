#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace physr {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec3f = Eigen::Vector3f;
using Mat3 = Eigen::Matrix3d;
using Rgb8 = std::array<std::uint8_t, 3>;

// Pinhole intrinsics in pixels. Pixel centres sit at integer coordinates, so
// pixel (i, j) covers [i - 0.5, i + 0.5) x [j - 0.5, j + 0.5).
struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  bool operator==(const Intrinsics&) const = default;
};

// World-to-camera rigid transform: x_cam = rotation * x_world + translation.
struct CameraPose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 to_camera(const Vec3& world) const { return rotation * world + translation; }
  Vec3 to_world(const Vec3& cam) const { return rotation.transpose() * (cam - translation); }
  Vec3 center() const { return -rotation.transpose() * translation; }

  bool operator==(const CameraPose& o) const {
    return rotation == o.rotation && translation == o.translation;
  }
};

// Camera looking from `eye` at `target`; +y of the image points along -up.
CameraPose look_at(const Vec3& eye, const Vec3& target, const Vec3& up = Vec3::UnitZ());

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  Image() = default;
  Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

  std::uint8_t* pixel(int x, int y) { return &rgb[(static_cast<std::size_t>(y) * width + x) * 3]; }
  const std::uint8_t* pixel(int x, int y) const {
    return &rgb[(static_cast<std::size_t>(y) * width + x) * 3];
  }
  bool operator==(const Image&) const = default;
};

// Z-depth along the camera axis in metres; 0 marks an invalid pixel.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> values;  // row-major

  DepthMap() = default;
  DepthMap(int w, int h) : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.0F) {}

  float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  float& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  bool operator==(const DepthMap&) const = default;
};

// Encoder-native feature grid (height x width x dim). Lookups take image
// pixel coordinates and resample bilinearly onto the image lattice.
struct FeatureMap {
  int height = 0;
  int width = 0;
  int dim = 0;
  std::vector<float> values;  // row-major, dim floats per cell

  FeatureMap() = default;
  FeatureMap(int h, int w, int d)
      : height(h), width(w), dim(d), values(static_cast<std::size_t>(h) * w * d, 0.0F) {}

  std::span<float> cell(int x, int y) {
    return {&values[(static_cast<std::size_t>(y) * width + x) * dim], static_cast<std::size_t>(dim)};
  }
  std::span<const float> cell(int x, int y) const {
    return {&values[(static_cast<std::size_t>(y) * width + x) * dim], static_cast<std::size_t>(dim)};
  }

  // Adds weight * F(u, v) into out (size dim); (u, v) in image pixels of an
  // image_width x image_height view.
  void sample_bilinear(double u, double v, int image_width, int image_height, double weight,
                       std::span<double> out) const;

  // As sample_bilinear, but drops taps whose depth (nearest pixel to the tap's
  // cell centre) differs from `depth` by more than `tolerance`, renormalizing
  // the rest. Keeps all four taps when none pass.
  void sample_bilinear_gated(double u, double v, const DepthMap& depth_map, double depth, double tolerance,
                             double weight, std::span<double> out) const;

  bool operator==(const FeatureMap&) const = default;
};

struct ViewRecord {
  Image image;
  DepthMap depth;
  Intrinsics intrinsics;
  CameraPose pose;
  FeatureMap features;

  int width() const { return image.width; }
  int height() const { return image.height; }
  bool operator==(const ViewRecord&) const = default;
};

struct PointCloud {
  std::vector<Vec3f> positions;
  std::vector<Rgb8> colors;  // empty or one per position

  std::size_t size() const { return positions.size(); }
  bool has_colors() const { return !colors.empty(); }
  bool operator==(const PointCloud&) const = default;
};

struct AxisAlignedBox {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 extent() const { return max - min; }
  double volume() const { const Vec3 e = extent(); return e.x() * e.y() * e.z(); }
  double diagonal() const { return extent().norm(); }
};

AxisAlignedBox bounding_box(std::span<const Vec3f> points);

}  // namespace physr
