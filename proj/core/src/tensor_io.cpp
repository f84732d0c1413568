#include "physr/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>

#include "physr/errors.hpp"

namespace physr::io {
namespace {

static_assert(std::endian::native == std::endian::little,
              "tensor blobs are little-endian; big-endian hosts need byte swapping");

constexpr char kMagic[3] = {'F', '3', '2'};

}  // namespace

std::size_t Tensor::element_count() const {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

void write_tensor(const std::filesystem::path& path, std::span<const std::uint32_t> dims,
                  std::span<const float> values) {
  if (dims.empty() || dims.size() > static_cast<std::size_t>(kTensorMaxRank)) {
    throw StructuralError("tensor rank must be 1.." + std::to_string(kTensorMaxRank));
  }
  const std::size_t count =
      std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  if (count != values.size()) {
    throw StructuralError("tensor dims describe " + std::to_string(count) + " values, got " +
                          std::to_string(values.size()));
  }
  std::array<unsigned char, kTensorHeaderBytes> header{};
  std::memcpy(header.data(), kMagic, 3);
  header[3] = static_cast<unsigned char>(dims.size());
  for (int i = 0; i < kTensorMaxRank; ++i) {
    const std::uint32_t d = i < static_cast<int>(dims.size()) ? dims[i] : 1U;
    std::memcpy(header.data() + 4 + 4 * i, &d, 4);
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out.write(reinterpret_cast<const char*>(header.data()), header.size());
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(float)));
  if (!out) throw IoError(path.string(), "write failed");
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "missing or unreadable tensor blob");
  std::array<unsigned char, kTensorHeaderBytes> header{};
  in.read(reinterpret_cast<char*>(header.data()), header.size());
  if (in.gcount() != static_cast<std::streamsize>(header.size()) ||
      std::memcmp(header.data(), kMagic, 3) != 0) {
    throw StructuralError(path.string() + ": not a float32 tensor blob");
  }
  const int rank = header[3];
  if (rank < 1 || rank > kTensorMaxRank) {
    throw StructuralError(path.string() + ": bad tensor rank " + std::to_string(rank));
  }
  Tensor t;
  t.dims.resize(rank);
  for (int i = 0; i < rank; ++i) std::memcpy(&t.dims[i], header.data() + 4 + 4 * i, 4);
  t.values.resize(t.element_count());
  in.read(reinterpret_cast<char*>(t.values.data()),
          static_cast<std::streamsize>(t.values.size() * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(t.values.size() * sizeof(float))) {
    throw StructuralError(path.string() + ": truncated tensor payload");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw StructuralError(path.string() + ": trailing bytes after tensor payload");
  }
  return t;
}

}  // namespace physr::io
