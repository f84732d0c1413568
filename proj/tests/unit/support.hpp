#pragma once

#include <Eigen/Geometry>
#include <filesystem>
#include <random>
#include <string>

#include "physr/physr.hpp"

namespace physr::test {

inline std::filesystem::path data_dir() { return PHYSR_TEST_DATA_DIR; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("physr_test_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// w x h view with constant depth and a zero feature map of dimension fdim.
inline ViewRecord flat_view(int w, int h, double f, const CameraPose& pose, float depth, int fdim = 4) {
  ViewRecord v;
  v.image = Image(w, h);
  v.depth = DepthMap(w, h);
  std::fill(v.depth.values.begin(), v.depth.values.end(), depth);
  v.intrinsics = {f, f, 0.5 * (w - 1), 0.5 * (h - 1)};
  v.pose = pose;
  v.features = FeatureMap(h, w, fdim);
  return v;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v(n(rng), n(rng), n(rng));
  return v.normalized();
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized().toRotationMatrix();
}

inline RowMatrixf random_unit_rows(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<float> n(0.0F, 1.0F);
  RowMatrixf m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = n(rng);
    m.row(i).normalize();
  }
  return m;
}

}  // namespace physr::test
