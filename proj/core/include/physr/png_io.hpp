#pragma once

#include <filesystem>

#include "physr/types.hpp"

namespace physr::io {

// 8-bit RGB PNG; other colour types are converted to RGB on read.
void write_png(const std::filesystem::path& path, const Image& image);
Image read_png(const std::filesystem::path& path);

}  // namespace physr::io
