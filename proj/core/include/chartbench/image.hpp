#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace chartbench {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// 8-bit RGB raster, row-major. provenance tags where the image came from:
// original | simple | negative | annotated.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
  std::string provenance = "original";

  static Image blank(int width, int height, Rgb fill);

  Rgb get(int x, int y) const {
    std::size_t at = 3 * (static_cast<std::size_t>(y) * width + x);
    return Rgb{pixels[at], pixels[at + 1], pixels[at + 2]};
  }
  void set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    std::size_t at = 3 * (static_cast<std::size_t>(y) * width + x);
    pixels[at] = c.r;
    pixels[at + 1] = c.g;
    pixels[at + 2] = c.b;
  }
  bool same_pixels(const Image& other) const {
    return width == other.width && height == other.height && pixels == other.pixels;
  }
};

// PNG encode/decode. Decoding normalizes any PNG color type to 8-bit RGB
// (alpha is composited over white).
std::vector<std::uint8_t> encode_png(const Image& image);
Image decode_png(const std::uint8_t* data, std::size_t size);

void save_png(const Image& image, const std::filesystem::path& path);
Image load_png(const std::filesystem::path& path);

}  // namespace chartbench
