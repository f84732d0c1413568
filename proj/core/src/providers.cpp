#include "physr/providers.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "physr/errors.hpp"
#include "physr/tensor_io.hpp"

namespace physr {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

RowMatrixf normalized_row(const Eigen::Vector3d& v) {
  RowMatrixf row = RowMatrixf::Zero(1, 3);
  const double n = v.norm();
  if (n > 0.0) row.row(0) = (v / n).cast<float>().transpose();
  return row;
}

}  // namespace

Rgb8 MeanColorProvider::material_color(std::string_view name) {
  const double hue = static_cast<double>(fnv1a(name) % 360);
  const double h = hue / 60.0;
  const double x = 1.0 - std::abs(std::fmod(h, 2.0) - 1.0);
  Eigen::Vector3d rgb;
  switch (static_cast<int>(h)) {
    case 0: rgb = {1, x, 0}; break;
    case 1: rgb = {x, 1, 0}; break;
    case 2: rgb = {0, 1, x}; break;
    case 3: rgb = {0, x, 1}; break;
    case 4: rgb = {x, 0, 1}; break;
    default: rgb = {1, 0, x}; break;
  }
  return {static_cast<std::uint8_t>(std::lround(255 * rgb[0])), static_cast<std::uint8_t>(std::lround(255 * rgb[1])),
          static_cast<std::uint8_t>(std::lround(255 * rgb[2]))};
}

Eigen::Vector3d MeanColorProvider::mean_color(const Image& image, const fusion::PatchWindow& window) {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (int y = window.y0; y < window.y0 + window.height; ++y) {
    for (int x = window.x0; x < window.x0 + window.width; ++x) {
      const std::uint8_t* px = image.pixel(x, y);
      sum += Eigen::Vector3d(px[0], px[1], px[2]);
    }
  }
  return sum / (255.0 * window.width * window.height);
}

RowMatrixf MeanColorProvider::embed(std::span<const ImagePatch> patches) {
  RowMatrixf out(static_cast<Eigen::Index>(patches.size()), 3);
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const auto& p = patches[i];
    if (p.image == nullptr) throw Error("mean-color provider: patch without image");
    const auto& w = p.window;
    if (w.width <= 0 || w.height <= 0 || w.x0 < 0 || w.y0 < 0 || w.x0 + w.width > p.image->width ||
        w.y0 + w.height > p.image->height) {
      throw Error("mean-color provider: patch window outside image");
    }
    out.row(static_cast<Eigen::Index>(i)) = normalized_row(mean_color(*p.image, w));
  }
  return out;
}

RowMatrixf MeanColorProvider::embed_text(std::span<const std::string> texts) {
  RowMatrixf out(static_cast<Eigen::Index>(texts.size()), 3);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const Rgb8 c = material_color(texts[i]);
    out.row(static_cast<Eigen::Index>(i)) = normalized_row(Eigen::Vector3d(c[0], c[1], c[2]));
  }
  return out;
}

FileEmbeddingProvider::FileEmbeddingProvider(const std::filesystem::path& dir) {
  using nlohmann::json;
  auto read_index = [](const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string(), "missing embedding index");
    try {
      return json::parse(in);
    } catch (const json::parse_error& e) {
      throw StructuralError(path.string() + ": malformed JSON: " + e.what());
    }
  };
  auto to_matrix = [](const io::Tensor& t, const std::filesystem::path& path) {
    if (t.dims.size() != 2) throw StructuralError(path.string() + ": embedding blob must be rank 2");
    RowMatrixf m(t.dims[0], t.dims[1]);
    std::copy(t.values.begin(), t.values.end(), m.data());
    return m;
  };

  patch_rows_ = to_matrix(io::read_tensor(dir / "patches.f32"), dir / "patches.f32");
  text_rows_ = to_matrix(io::read_tensor(dir / "text.f32"), dir / "text.f32");
  if (patch_rows_.cols() != text_rows_.cols()) {
    throw StructuralError(dir.string() + ": patch and text embeddings differ in dimension");
  }
  dim_ = static_cast<std::size_t>(patch_rows_.cols());

  const json patches = read_index(dir / "patches.index.json");
  if (!patches.is_array() || patches.size() != static_cast<std::size_t>(patch_rows_.rows())) {
    throw StructuralError(dir.string() + ": patch index length does not match patches.f32");
  }
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const auto& e = patches[i];
    patch_index_[{e.at("view").get<std::uint32_t>(), e.at("u").get<int>(), e.at("v").get<int>(),
                  e.at("scale").get<int>()}] = i;
  }
  const json texts = read_index(dir / "text.index.json");
  if (!texts.is_array() || texts.size() != static_cast<std::size_t>(text_rows_.rows())) {
    throw StructuralError(dir.string() + ": text index length does not match text.f32");
  }
  for (std::size_t i = 0; i < texts.size(); ++i) text_index_[texts[i].get<std::string>()] = i;
}

RowMatrixf FileEmbeddingProvider::embed(std::span<const ImagePatch> patches) {
  RowMatrixf out(static_cast<Eigen::Index>(patches.size()), static_cast<Eigen::Index>(dim_));
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const auto& p = patches[i];
    const auto it = patch_index_.find({p.view, p.center.x(), p.center.y(), p.scale});
    if (it == patch_index_.end()) {
      throw Error("no precomputed embedding for view " + std::to_string(p.view) + " at (" +
                  std::to_string(p.center.x()) + ", " + std::to_string(p.center.y()) + ") scale " +
                  std::to_string(p.scale));
    }
    out.row(static_cast<Eigen::Index>(i)) = patch_rows_.row(static_cast<Eigen::Index>(it->second));
  }
  return out;
}

RowMatrixf FileEmbeddingProvider::embed_text(std::span<const std::string> texts) {
  RowMatrixf out(static_cast<Eigen::Index>(texts.size()), static_cast<Eigen::Index>(dim_));
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto it = text_index_.find(texts[i]);
    if (it == text_index_.end()) throw Error("no precomputed text embedding for '" + texts[i] + "'");
    out.row(static_cast<Eigen::Index>(i)) = text_rows_.row(static_cast<Eigen::Index>(it->second));
  }
  return out;
}

void FileEmbeddingProvider::write(const std::filesystem::path& dir, const std::vector<PatchKey>& keys,
                                  const RowMatrixf& patch_rows, const std::vector<std::string>& texts,
                                  const RowMatrixf& text_rows) {
  using nlohmann::json;
  if (keys.size() != static_cast<std::size_t>(patch_rows.rows()) ||
      texts.size() != static_cast<std::size_t>(text_rows.rows())) {
    throw StructuralError("embedding rows do not match their index");
  }
  std::filesystem::create_directories(dir);
  const std::uint32_t pdims[2] = {static_cast<std::uint32_t>(patch_rows.rows()),
                                  static_cast<std::uint32_t>(patch_rows.cols())};
  io::write_tensor(dir / "patches.f32", pdims, {patch_rows.data(), static_cast<std::size_t>(patch_rows.size())});
  const std::uint32_t tdims[2] = {static_cast<std::uint32_t>(text_rows.rows()),
                                  static_cast<std::uint32_t>(text_rows.cols())};
  io::write_tensor(dir / "text.f32", tdims, {text_rows.data(), static_cast<std::size_t>(text_rows.size())});

  json index = json::array();
  for (const auto& [view, u, v, scale] : keys) index.push_back({{"view", view}, {"u", u}, {"v", v}, {"scale", scale}});
  std::ofstream(dir / "patches.index.json") << index.dump() << '\n';
  std::ofstream(dir / "text.index.json") << json(texts).dump() << '\n';
}

RowMatrixf CountingProvider::embed(std::span<const ImagePatch> patches) {
  ++embed_calls;
  embedded_patches += patches.size();
  return inner_.embed(patches);
}

RowMatrixf CountingProvider::embed_text(std::span<const std::string> texts) {
  ++text_calls;
  return inner_.embed_text(texts);
}

}  // namespace physr
