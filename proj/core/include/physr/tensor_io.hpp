#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace physr::io {

// Dense float32 tensor blob.
//
// Layout (little-endian):
//   bytes 0..2   magic "F32"
//   byte  3      rank (1..3)
//   bytes 4..15  three uint32 dims, unused trailing dims stored as 1
//   bytes 16..   prod(dims) IEEE-754 float32 values, row-major
inline constexpr std::size_t kTensorHeaderBytes = 16;
inline constexpr int kTensorMaxRank = 3;

struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::size_t element_count() const;
  bool operator==(const Tensor&) const = default;
};

void write_tensor(const std::filesystem::path& path, std::span<const std::uint32_t> dims,
                  std::span<const float> values);
Tensor read_tensor(const std::filesystem::path& path);

}  // namespace physr::io
