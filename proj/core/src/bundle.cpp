#include "physr/bundle.hpp"

#include <Eigen/LU>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "physr/errors.hpp"
#include "physr/parallel.hpp"
#include "physr/ply.hpp"
#include "physr/png_io.hpp"
#include "physr/tensor_io.hpp"

namespace physr {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kManifestName = "manifest";
constexpr const char* kCloudName = "cloud.ply";
constexpr const char* kMaterialsName = "materials.json";
constexpr const char* kRefPosesName = "ref_poses.json";
constexpr int kFormatVersion = 1;

fs::path view_dir(const fs::path& root, std::size_t i) { return root / "views" / std::to_string(i); }

json pose_to_json(const CameraPose& pose) {
  json rot = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) rot.push_back(pose.rotation(r, c));
  }
  return {{"rotation", rot},
          {"translation", {pose.translation.x(), pose.translation.y(), pose.translation.z()}}};
}

CameraPose pose_from_json(const json& j, const std::string& where) {
  if (!j.contains("rotation") || !j.contains("translation") || j.at("rotation").size() != 9 ||
      j.at("translation").size() != 3) {
    throw StructuralError(where + ": pose needs 9 rotation and 3 translation values");
  }
  CameraPose pose;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) pose.rotation(r, c) = j.at("rotation")[3 * r + c].get<double>();
  }
  for (int i = 0; i < 3; ++i) pose.translation[i] = j.at("translation")[i].get<double>();
  return pose;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "missing or unreadable");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw StructuralError(path.string() + ": malformed JSON: " + e.what());
  }
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << text << '\n';
  if (!out) throw IoError(path.string(), "write failed");
}

void validate_pose(const CameraPose& pose, const std::string& where) {
  if (!pose.rotation.allFinite() || !pose.translation.allFinite()) {
    throw ValidationError(where + ": non-finite pose");
  }
  if (!is_rotation(pose.rotation)) throw ValidationError(where + ": rotation is not orthonormal with det 1");
}

ViewRecord load_view(const fs::path& root, std::size_t index, const json& jv) {
  const std::string where = "view " + std::to_string(index);
  const fs::path dir = view_dir(root, index);
  ViewRecord view;
  view.image = io::read_png(dir / "image.png");
  const int width = jv.at("width").get<int>();
  const int height = jv.at("height").get<int>();
  if (view.image.width != width || view.image.height != height) {
    throw StructuralError(where + ": image is " + std::to_string(view.image.width) + "x" +
                          std::to_string(view.image.height) + ", manifest says " + std::to_string(width) + "x" +
                          std::to_string(height));
  }

  const io::Tensor depth = io::read_tensor(dir / "depth.f32");
  if (depth.dims.size() != 2 || static_cast<int>(depth.dims[0]) != height ||
      static_cast<int>(depth.dims[1]) != width) {
    throw StructuralError(where + ": depth blob shape does not match image " + std::to_string(height) + "x" +
                          std::to_string(width));
  }
  view.depth.width = width;
  view.depth.height = height;
  view.depth.values = depth.values;

  const io::Tensor feat = io::read_tensor(dir / "feat.f32");
  if (feat.dims.size() != 3) throw StructuralError(where + ": feature blob must be rank 3");
  const auto& shape = jv.at("feature_shape");
  for (int i = 0; i < 3; ++i) {
    if (shape.at(i).get<std::uint32_t>() != feat.dims[i]) {
      throw StructuralError(where + ": feature blob shape disagrees with manifest");
    }
  }
  view.features.height = static_cast<int>(feat.dims[0]);
  view.features.width = static_cast<int>(feat.dims[1]);
  view.features.dim = static_cast<int>(feat.dims[2]);
  view.features.values = feat.values;

  const auto& k = jv.at("intrinsics");
  view.intrinsics = {k.at("fx").get<double>(), k.at("fy").get<double>(), k.at("cx").get<double>(),
                     k.at("cy").get<double>()};
  view.pose = pose_from_json(jv, where);
  return view;
}

}  // namespace

bool is_rotation(const Mat3& r, double tol) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(r.determinant() - 1.0) <= tol;
}

void validate(const CaptureBundle& bundle) {
  if (bundle.views.empty()) throw ValidationError("bundle has no views");
  if (bundle.cloud.positions.empty()) throw ValidationError("bundle point cloud is empty");
  if (bundle.cloud.has_colors() && bundle.cloud.colors.size() != bundle.cloud.positions.size()) {
    throw StructuralError("point colors do not match point count");
  }
  for (const auto& p : bundle.cloud.positions) {
    if (!p.allFinite()) throw ValidationError("point cloud has non-finite coordinates");
  }
  const int dim = bundle.views.front().features.dim;
  for (std::size_t i = 0; i < bundle.views.size(); ++i) {
    const auto& v = bundle.views[i];
    const std::string where = "view " + std::to_string(i);
    if (v.image.width <= 0 || v.image.height <= 0 ||
        v.image.rgb.size() != static_cast<std::size_t>(v.image.width) * v.image.height * 3) {
      throw StructuralError(where + ": image buffer does not match its dimensions");
    }
    if (v.depth.width != v.image.width || v.depth.height != v.image.height ||
        v.depth.values.size() != static_cast<std::size_t>(v.depth.width) * v.depth.height) {
      throw StructuralError(where + ": depth map shape does not match image");
    }
    if (v.features.height <= 0 || v.features.width <= 0 || v.features.dim <= 0 ||
        v.features.values.size() !=
            static_cast<std::size_t>(v.features.height) * v.features.width * v.features.dim) {
      throw StructuralError(where + ": feature map buffer does not match its shape");
    }
    if (v.features.dim != dim) throw StructuralError(where + ": feature dimension differs from view 0");
    for (float d : v.depth.values) {
      if (!(d >= 0.0F) || !std::isfinite(d)) throw ValidationError(where + ": depth must be finite and >= 0");
    }
    const auto& k = v.intrinsics;
    if (!(k.fx > 0.0) || !(k.fy > 0.0) || !std::isfinite(k.cx) || !std::isfinite(k.cy)) {
      throw ValidationError(where + ": intrinsics must be positive");
    }
    validate_pose(v.pose, where);
  }
  if (bundle.reference_poses) {
    if (bundle.reference_poses->size() != bundle.views.size()) {
      throw StructuralError("reference pose count does not match view count");
    }
    for (std::size_t i = 0; i < bundle.reference_poses->size(); ++i) {
      validate_pose((*bundle.reference_poses)[i], "reference pose " + std::to_string(i));
    }
  }
  if (bundle.materials) validate(*bundle.materials);
  if (bundle.meta.ground_truth_mass_kg && !(*bundle.meta.ground_truth_mass_kg > 0.0)) {
    throw ValidationError("ground-truth mass must be positive");
  }
}

std::vector<std::size_t> evenly_spaced_indices(std::size_t count, std::size_t limit) {
  std::vector<std::size_t> out;
  if (count == 0 || limit == 0) return out;
  if (limit >= count) {
    for (std::size_t i = 0; i < count; ++i) out.push_back(i);
    return out;
  }
  for (std::size_t j = 0; j < limit; ++j) out.push_back(j * count / limit);
  return out;
}

CaptureBundle load_bundle(const fs::path& dir, const LoadOptions& options) {
  const json manifest = read_json_file(dir / kManifestName);
  CaptureBundle bundle;
  try {
    if (manifest.value("version", 0) != kFormatVersion) {
      throw StructuralError("unsupported bundle version");
    }
    bundle.meta.scene_id = manifest.value("scene_id", std::string());
    if (manifest.contains("ground_truth_mass_kg")) {
      bundle.meta.ground_truth_mass_kg = manifest.at("ground_truth_mass_kg").get<double>();
    }
    const auto& jviews = manifest.at("views");
    if (!jviews.is_array() || jviews.empty()) throw ValidationError("manifest lists no views");

    const std::size_t total = jviews.size();
    const auto keep = evenly_spaced_indices(total, options.view_limit.value_or(total));
    bundle.views.resize(keep.size());
    parallel_for(
        keep.size(), [&](std::size_t j) { bundle.views[j] = load_view(dir, keep[j], jviews.at(keep[j])); }, 1);

    bundle.cloud = io::read_point_cloud_ply(dir / kCloudName);
    if (manifest.at("point_count").get<std::size_t>() != bundle.cloud.size()) {
      throw StructuralError("cloud.ply holds " + std::to_string(bundle.cloud.size()) +
                            " points, manifest says " + manifest.at("point_count").dump());
    }

    if (manifest.contains("reference_poses")) {
      const fs::path path = dir / manifest.at("reference_poses").get<std::string>();
      const json jposes = read_json_file(path);
      if (!jposes.is_array() || jposes.size() != total) {
        throw StructuralError(path.string() + ": expected one reference pose per view");
      }
      std::vector<CameraPose> poses;
      for (std::size_t i : keep) poses.push_back(pose_from_json(jposes.at(i), path.string()));
      bundle.reference_poses = std::move(poses);
    }
    if (manifest.contains("materials")) {
      bundle.materials = load_materials(dir / manifest.at("materials").get<std::string>());
    }
  } catch (const json::exception& e) {
    throw StructuralError((dir / kManifestName).string() + ": " + e.what());
  }
  validate(bundle);
  return bundle;
}

void save_bundle(const CaptureBundle& bundle, const fs::path& dir) {
  validate(bundle);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), "cannot create directory: " + ec.message());

  json manifest;
  manifest["format"] = "physr-bundle";
  manifest["version"] = kFormatVersion;
  manifest["scene_id"] = bundle.meta.scene_id;
  if (bundle.meta.ground_truth_mass_kg) manifest["ground_truth_mass_kg"] = *bundle.meta.ground_truth_mass_kg;
  manifest["depth_unit"] = "m";
  manifest["depth_kind"] = "z";
  manifest["point_count"] = bundle.cloud.size();
  manifest["point_colors"] = bundle.cloud.has_colors();
  manifest["views"] = json::array();

  for (std::size_t i = 0; i < bundle.views.size(); ++i) {
    const auto& v = bundle.views[i];
    const fs::path vdir = view_dir(dir, i);
    fs::create_directories(vdir, ec);
    if (ec) throw IoError(vdir.string(), "cannot create directory: " + ec.message());
    io::write_png(vdir / "image.png", v.image);
    const std::uint32_t ddims[2] = {static_cast<std::uint32_t>(v.depth.height),
                                    static_cast<std::uint32_t>(v.depth.width)};
    io::write_tensor(vdir / "depth.f32", ddims, v.depth.values);
    const std::uint32_t fdims[3] = {static_cast<std::uint32_t>(v.features.height),
                                    static_cast<std::uint32_t>(v.features.width),
                                    static_cast<std::uint32_t>(v.features.dim)};
    io::write_tensor(vdir / "feat.f32", fdims, v.features.values);

    json jv = pose_to_json(v.pose);
    jv["width"] = v.image.width;
    jv["height"] = v.image.height;
    jv["intrinsics"] = {{"fx", v.intrinsics.fx}, {"fy", v.intrinsics.fy}, {"cx", v.intrinsics.cx},
                        {"cy", v.intrinsics.cy}};
    jv["feature_shape"] = {fdims[0], fdims[1], fdims[2]};
    manifest["views"].push_back(std::move(jv));
  }

  io::write_point_cloud_ply(dir / kCloudName, bundle.cloud);
  if (bundle.reference_poses) {
    json jposes = json::array();
    for (const auto& p : *bundle.reference_poses) jposes.push_back(pose_to_json(p));
    write_text_file(dir / kRefPosesName, jposes.dump(2));
    manifest["reference_poses"] = kRefPosesName;
  }
  if (bundle.materials) {
    save_materials(dir / kMaterialsName, *bundle.materials);
    manifest["materials"] = kMaterialsName;
  }
  write_text_file(dir / kManifestName, manifest.dump(2));
}

}  // namespace physr
