#include "physr/png_io.hpp"

#include <png.h>

#include <cstring>

#include "physr/errors.hpp"

namespace physr::io {

void write_png(const std::filesystem::path& path, const Image& image) {
  if (image.width <= 0 || image.height <= 0 ||
      image.rgb.size() != static_cast<std::size_t>(image.width) * image.height * 3) {
    throw StructuralError("image buffer does not match its dimensions");
  }
  png_image desc;
  std::memset(&desc, 0, sizeof(desc));
  desc.version = PNG_IMAGE_VERSION;
  desc.width = static_cast<png_uint_32>(image.width);
  desc.height = static_cast<png_uint_32>(image.height);
  desc.format = PNG_FORMAT_RGB;
  if (png_image_write_to_file(&desc, path.c_str(), 0, image.rgb.data(), 0, nullptr) == 0) {
    const std::string message = desc.message;
    png_image_free(&desc);
    throw IoError(path.string(), "PNG write failed: " + message);
  }
}

Image read_png(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError(path.string(), "missing image");
  png_image desc;
  std::memset(&desc, 0, sizeof(desc));
  desc.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&desc, path.c_str()) == 0) {
    throw IoError(path.string(), std::string("PNG decode failed: ") + desc.message);
  }
  desc.format = PNG_FORMAT_RGB;
  Image image(static_cast<int>(desc.width), static_cast<int>(desc.height));
  if (png_image_finish_read(&desc, nullptr, image.rgb.data(), 0, nullptr) == 0) {
    const std::string message = desc.message;
    png_image_free(&desc);
    throw IoError(path.string(), "PNG decode failed: " + message);
  }
  return image;
}

}  // namespace physr::io
