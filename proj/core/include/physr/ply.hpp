#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "physr/types.hpp"

namespace physr::io {

// Binary little-endian PLY, vertex element only.

void write_point_cloud_ply(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_point_cloud_ply(const std::filesystem::path& path);

// Header text write_point_cloud_ply emits for a cloud of `count` points.
std::string point_cloud_ply_header(std::size_t count, bool with_colors);

// Named per-vertex column for ad-hoc exports (property fields, labels).
struct PlyColumn {
  std::string name;
  std::variant<std::vector<float>, std::vector<std::int32_t>, std::vector<std::uint8_t>> data;

  std::size_t size() const;
};

void write_vertex_table_ply(const std::filesystem::path& path, const std::vector<PlyColumn>& columns);
std::vector<PlyColumn> read_vertex_table_ply(const std::filesystem::path& path);

}  // namespace physr::io
