#include "chartbench/image.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>

#include "chartbench/error.hpp"

namespace chartbench {
namespace {

struct MemorySink {
  std::vector<std::uint8_t>* out;
};

void write_to_sink(png_structp png, png_bytep data, png_size_t length) {
  auto* sink = static_cast<MemorySink*>(png_get_io_ptr(png));
  sink->out->insert(sink->out->end(), data, data + length);
}

void flush_sink(png_structp) {}

struct MemorySource {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t offset;
};

void read_from_source(png_structp png, png_bytep out, png_size_t length) {
  auto* src = static_cast<MemorySource*>(png_get_io_ptr(png));
  if (src->offset + length > src->size) {
    png_error(png, "read past end of PNG buffer");
  }
  std::memcpy(out, src->data + src->offset, length);
  src->offset += length;
}

}  // namespace

Image Image::blank(int width, int height, Rgb fill) {
  Image img;
  img.width = width;
  img.height = height;
  img.pixels.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
    img.pixels[i] = fill.r;
    img.pixels[i + 1] = fill.g;
    img.pixels[i + 2] = fill.b;
  }
  return img;
}

std::vector<std::uint8_t> encode_png(const Image& image) {
  if (image.width <= 0 || image.height <= 0 ||
      image.pixels.size() != static_cast<std::size_t>(image.width) * image.height * 3) {
    raise(Errc::IoError, "cannot encode malformed image buffer");
  }
  std::vector<std::uint8_t> out;
  MemorySink sink{&out};

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) raise(Errc::IoError, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    raise(Errc::IoError, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    raise(Errc::IoError, "libpng write error");
  }
  png_set_write_fn(png, &sink, write_to_sink, flush_sink);
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < image.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(image.pixels.data() +
                                             static_cast<std::size_t>(y) * image.width * 3));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

Image decode_png(const std::uint8_t* data, std::size_t size) {
  if (size < 8 || png_sig_cmp(data, 0, 8) != 0) {
    raise(Errc::IoError, "not a PNG stream");
  }
  MemorySource source{data, size, 0};

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) raise(Errc::IoError, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    raise(Errc::IoError, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    raise(Errc::IoError, "libpng read error");
  }
  png_set_read_fn(png, &source, read_from_source);
  png_read_info(png, info);

  // Normalize everything to 8-bit RGB.
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_gray_to_rgb(png);
  png_byte color_type = png_get_color_type(png, info);
  if ((color_type & PNG_COLOR_MASK_ALPHA) != 0 || png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_strip_alpha(png);
  }
  png_read_update_info(png, info);

  Image img;
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  if (png_get_rowbytes(png, info) != static_cast<std::size_t>(img.width) * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    raise(Errc::IoError, "unsupported PNG layout");
  }
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height * 3);
  for (int y = 0; y < img.height; ++y) {
    png_read_row(png, img.pixels.data() + static_cast<std::size_t>(y) * img.width * 3, nullptr);
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  img.provenance = "original";
  return img;
}

void save_png(const Image& image, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes = encode_png(image);
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) raise(Errc::IoError, "cannot open for writing: " + path.string());
  std::size_t written = std::fwrite(bytes.data(), 1, bytes.size(), f);
  std::fclose(f);
  if (written != bytes.size()) raise(Errc::IoError, "short write: " + path.string());
}

Image load_png(const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "rb");
  if (!f) raise(Errc::IoError, "cannot open for reading: " + path.string());
  std::fseek(f, 0, SEEK_END);
  long size = std::ftell(f);
  std::fseek(f, 0, SEEK_SET);
  if (size <= 0) {
    std::fclose(f);
    raise(Errc::IoError, "empty file: " + path.string());
  }
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  std::size_t got = std::fread(bytes.data(), 1, bytes.size(), f);
  std::fclose(f);
  if (got != bytes.size()) raise(Errc::IoError, "short read: " + path.string());
  return decode_png(bytes.data(), bytes.size());
}

}  // namespace chartbench
