#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "physr/fusion.hpp"

namespace physr {

struct ImagePatch {
  const Image* image = nullptr;
  std::uint32_t view = 0;
  fusion::PatchWindow window;
  Eigen::Vector2i center = Eigen::Vector2i::Zero();
  int scale = 0;
};

// Image/text encoder behind the semantic fusion stage. Implementations
// return one unit-norm row per input and must be deterministic.
class PatchEmbeddingProvider {
 public:
  virtual ~PatchEmbeddingProvider() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual RowMatrixf embed(std::span<const ImagePatch> patches) = 0;
  virtual RowMatrixf embed_text(std::span<const std::string> texts) = 0;
};

// Analytic provider for tests and synthetic scenes: a patch embeds to its
// normalised mean RGB colour; a material name embeds to the normalised
// colour material_color(name). Synthetic scenes paint each material with
// that colour, so grounding is exact up to patch mixing.
class MeanColorProvider final : public PatchEmbeddingProvider {
 public:
  std::string name() const override { return "mean-color"; }
  std::size_t dimension() const override { return 3; }
  RowMatrixf embed(std::span<const ImagePatch> patches) override;
  RowMatrixf embed_text(std::span<const std::string> texts) override;

  // Fully saturated colour whose hue is derived from a hash of the name.
  static Rgb8 material_color(std::string_view name);
  // Un-normalised mean colour of a patch window in [0, 1]^3.
  static Eigen::Vector3d mean_color(const Image& image, const fusion::PatchWindow& window);
};

// Replays embeddings precomputed by an external encoder.
//
// Directory layout:
//   patches.f32         tensor blob [M, E]
//   patches.index.json  [{"view": v, "u": x, "v": y, "scale": s}, ...] row order
//   text.f32            tensor blob [K, E]
//   text.index.json     ["name", ...] row order
class FileEmbeddingProvider final : public PatchEmbeddingProvider {
 public:
  explicit FileEmbeddingProvider(const std::filesystem::path& dir);

  std::string name() const override { return "file"; }
  std::size_t dimension() const override { return dim_; }
  RowMatrixf embed(std::span<const ImagePatch> patches) override;
  RowMatrixf embed_text(std::span<const std::string> texts) override;

  using PatchKey = std::tuple<std::uint32_t, int, int, int>;  // view, u, v, scale

  static void write(const std::filesystem::path& dir, const std::vector<PatchKey>& keys,
                    const RowMatrixf& patch_rows, const std::vector<std::string>& texts,
                    const RowMatrixf& text_rows);

 private:
  std::size_t dim_ = 0;
  RowMatrixf patch_rows_;
  RowMatrixf text_rows_;
  std::map<PatchKey, std::size_t> patch_index_;
  std::map<std::string, std::size_t> text_index_;
};

// Decorator counting calls and items; used by tests and the bench driver.
class CountingProvider final : public PatchEmbeddingProvider {
 public:
  explicit CountingProvider(PatchEmbeddingProvider& inner) : inner_(inner) {}

  std::string name() const override { return inner_.name(); }
  std::size_t dimension() const override { return inner_.dimension(); }
  RowMatrixf embed(std::span<const ImagePatch> patches) override;
  RowMatrixf embed_text(std::span<const std::string> texts) override;

  std::size_t embed_calls = 0;
  std::size_t embedded_patches = 0;
  std::size_t text_calls = 0;

 private:
  PatchEmbeddingProvider& inner_;
};

}  // namespace physr
