#include "physr/ply.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "physr/errors.hpp"

namespace physr::io {
namespace {

enum class ScalarType { kInt8, kUInt8, kInt16, kUInt16, kInt32, kUInt32, kFloat32, kFloat64 };

struct ScalarInfo {
  ScalarType type;
  int bytes;
};

const std::map<std::string, ScalarInfo>& scalar_types() {
  static const std::map<std::string, ScalarInfo> table = {
      {"char", {ScalarType::kInt8, 1}},     {"int8", {ScalarType::kInt8, 1}},
      {"uchar", {ScalarType::kUInt8, 1}},   {"uint8", {ScalarType::kUInt8, 1}},
      {"short", {ScalarType::kInt16, 2}},   {"int16", {ScalarType::kInt16, 2}},
      {"ushort", {ScalarType::kUInt16, 2}}, {"uint16", {ScalarType::kUInt16, 2}},
      {"int", {ScalarType::kInt32, 4}},     {"int32", {ScalarType::kInt32, 4}},
      {"uint", {ScalarType::kUInt32, 4}},   {"uint32", {ScalarType::kUInt32, 4}},
      {"float", {ScalarType::kFloat32, 4}}, {"float32", {ScalarType::kFloat32, 4}},
      {"double", {ScalarType::kFloat64, 8}}, {"float64", {ScalarType::kFloat64, 8}},
  };
  return table;
}

struct Property {
  std::string name;
  ScalarInfo info;
};

struct VertexHeader {
  std::size_t count = 0;
  std::vector<Property> properties;
  std::size_t stride = 0;
};

VertexHeader parse_header(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line) || line != "ply") throw StructuralError(path + ": missing 'ply' magic");
  VertexHeader header;
  bool in_vertex = false;
  bool seen_vertex = false;
  bool format_ok = false;
  while (std::getline(in, line)) {
    if (line == "end_header") break;
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    if (keyword == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "binary_little_endian") throw StructuralError(path + ": unsupported PLY format " + fmt);
      format_ok = true;
    } else if (keyword == "element") {
      std::string name;
      std::size_t n = 0;
      ls >> name >> n;
      in_vertex = name == "vertex";
      if (in_vertex) {
        header.count = n;
        seen_vertex = true;
      } else if (!seen_vertex) {
        throw StructuralError(path + ": vertex element must come first");
      }
    } else if (keyword == "property" && in_vertex) {
      std::string type;
      std::string name;
      ls >> type >> name;
      if (type == "list") throw StructuralError(path + ": list properties on vertices are unsupported");
      const auto it = scalar_types().find(type);
      if (it == scalar_types().end()) throw StructuralError(path + ": unknown PLY type " + type);
      header.properties.push_back({name, it->second});
      header.stride += static_cast<std::size_t>(it->second.bytes);
    }
  }
  if (line != "end_header") throw StructuralError(path + ": unterminated PLY header");
  if (!format_ok) throw StructuralError(path + ": PLY header has no format line");
  if (!seen_vertex) throw StructuralError(path + ": PLY has no vertex element");
  return header;
}

double decode(const unsigned char* p, ScalarType type) {
  switch (type) {
    case ScalarType::kInt8: { std::int8_t v; std::memcpy(&v, p, 1); return v; }
    case ScalarType::kUInt8: return *p;
    case ScalarType::kInt16: { std::int16_t v; std::memcpy(&v, p, 2); return v; }
    case ScalarType::kUInt16: { std::uint16_t v; std::memcpy(&v, p, 2); return v; }
    case ScalarType::kInt32: { std::int32_t v; std::memcpy(&v, p, 4); return v; }
    case ScalarType::kUInt32: { std::uint32_t v; std::memcpy(&v, p, 4); return v; }
    case ScalarType::kFloat32: { float v; std::memcpy(&v, p, 4); return v; }
    case ScalarType::kFloat64: { double v; std::memcpy(&v, p, 8); return v; }
  }
  return 0.0;
}

std::vector<unsigned char> read_payload(std::istream& in, const VertexHeader& header, const std::string& path) {
  std::vector<unsigned char> payload(header.count * header.stride);
  in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (in.gcount() != static_cast<std::streamsize>(payload.size())) {
    throw StructuralError(path + ": truncated PLY vertex data");
  }
  return payload;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  return out;
}

}  // namespace

std::string point_cloud_ply_header(std::size_t count, bool with_colors) {
  std::string h = "ply\nformat binary_little_endian 1.0\nelement vertex " + std::to_string(count) +
                  "\nproperty float x\nproperty float y\nproperty float z\n";
  if (with_colors) h += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  h += "end_header\n";
  return h;
}

void write_point_cloud_ply(const std::filesystem::path& path, const PointCloud& cloud) {
  if (cloud.has_colors() && cloud.colors.size() != cloud.positions.size()) {
    throw StructuralError("point cloud has " + std::to_string(cloud.colors.size()) + " colors for " +
                          std::to_string(cloud.positions.size()) + " positions");
  }
  auto out = open_for_write(path);
  const std::string header = point_cloud_ply_header(cloud.size(), cloud.has_colors());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  const std::size_t stride = cloud.has_colors() ? 15 : 12;
  std::vector<unsigned char> payload(cloud.size() * stride);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    unsigned char* p = payload.data() + i * stride;
    std::memcpy(p, cloud.positions[i].data(), 12);
    if (cloud.has_colors()) std::memcpy(p + 12, cloud.colors[i].data(), 3);
  }
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (!out) throw IoError(path.string(), "write failed");
}

PointCloud read_point_cloud_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "missing or unreadable PLY");
  const VertexHeader header = parse_header(in, path.string());

  std::map<std::string, std::pair<std::size_t, ScalarInfo>> offsets;
  std::size_t offset = 0;
  for (const auto& prop : header.properties) {
    offsets[prop.name] = {offset, prop.info};
    offset += static_cast<std::size_t>(prop.info.bytes);
  }
  for (const char* axis : {"x", "y", "z"}) {
    if (!offsets.contains(axis)) throw StructuralError(path.string() + ": vertex lacks property " + axis);
  }
  const bool colored = offsets.contains("red") && offsets.contains("green") && offsets.contains("blue");
  const auto payload = read_payload(in, header, path.string());

  const bool fast_xyz = offsets["x"].second.type == ScalarType::kFloat32 && offsets["x"].first == 0 &&
                        offsets["y"].first == 4 && offsets["z"].first == 8 &&
                        offsets["y"].second.type == ScalarType::kFloat32 &&
                        offsets["z"].second.type == ScalarType::kFloat32;
  PointCloud cloud;
  cloud.positions.resize(header.count);
  if (colored) cloud.colors.resize(header.count);
  for (std::size_t i = 0; i < header.count; ++i) {
    const unsigned char* row = payload.data() + i * header.stride;
    if (fast_xyz) {
      std::memcpy(cloud.positions[i].data(), row, 12);
    } else {
      for (int a = 0; a < 3; ++a) {
        const auto& [off, info] = offsets[std::string(1, static_cast<char>('x' + a))];
        cloud.positions[i][a] = static_cast<float>(decode(row + off, info.type));
      }
    }
    if (colored) {
      const char* names[3] = {"red", "green", "blue"};
      for (int c = 0; c < 3; ++c) {
        const auto& [off, info] = offsets[names[c]];
        cloud.colors[i][c] = static_cast<std::uint8_t>(decode(row + off, info.type));
      }
    }
  }
  for (const auto& p : cloud.positions) {
    if (!p.allFinite()) throw ValidationError(path.string() + ": non-finite point coordinate");
  }
  return cloud;
}

std::size_t PlyColumn::size() const {
  return std::visit([](const auto& v) { return v.size(); }, data);
}

void write_vertex_table_ply(const std::filesystem::path& path, const std::vector<PlyColumn>& columns) {
  const std::size_t count = columns.empty() ? 0 : columns.front().size();
  std::string header = "ply\nformat binary_little_endian 1.0\nelement vertex " + std::to_string(count) + "\n";
  std::size_t stride = 0;
  for (const auto& col : columns) {
    if (col.size() != count) throw StructuralError("PLY column '" + col.name + "' has mismatched length");
    if (std::holds_alternative<std::vector<float>>(col.data)) {
      header += "property float " + col.name + "\n";
      stride += 4;
    } else if (std::holds_alternative<std::vector<std::int32_t>>(col.data)) {
      header += "property int " + col.name + "\n";
      stride += 4;
    } else {
      header += "property uchar " + col.name + "\n";
      stride += 1;
    }
  }
  header += "end_header\n";

  std::vector<unsigned char> payload(count * stride);
  std::size_t offset = 0;
  for (const auto& col : columns) {
    std::visit(
        [&](const auto& values) {
          using T = typename std::decay_t<decltype(values)>::value_type;
          for (std::size_t i = 0; i < count; ++i) {
            std::memcpy(payload.data() + i * stride + offset, &values[i], sizeof(T));
          }
          offset += sizeof(T);
        },
        col.data);
  }
  auto out = open_for_write(path);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (!out) throw IoError(path.string(), "write failed");
}

std::vector<PlyColumn> read_vertex_table_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "missing or unreadable PLY");
  const VertexHeader header = parse_header(in, path.string());
  const auto payload = read_payload(in, header, path.string());

  std::vector<PlyColumn> columns;
  std::size_t offset = 0;
  for (const auto& prop : header.properties) {
    PlyColumn col{prop.name, {}};
    auto fill = [&](auto& values) {
      values.resize(header.count);
      for (std::size_t i = 0; i < header.count; ++i) {
        using T = typename std::decay_t<decltype(values)>::value_type;
        values[i] = static_cast<T>(decode(payload.data() + i * header.stride + offset, prop.info.type));
      }
    };
    if (prop.info.type == ScalarType::kUInt8) {
      std::vector<std::uint8_t> v;
      fill(v);
      col.data = std::move(v);
    } else if (prop.info.type == ScalarType::kFloat32 || prop.info.type == ScalarType::kFloat64) {
      std::vector<float> v;
      fill(v);
      col.data = std::move(v);
    } else {
      std::vector<std::int32_t> v;
      fill(v);
      col.data = std::move(v);
    }
    columns.push_back(std::move(col));
    offset += static_cast<std::size_t>(prop.info.bytes);
  }
  return columns;
}

}  // namespace physr::io
