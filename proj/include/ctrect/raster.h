#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ctrect {

// 8-bit interleaved RGB raster.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

  std::uint8_t* pixel(int x, int y) { return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
  const std::uint8_t* pixel(int x, int y) const {
    return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
};

// Binary PPM (P6, maxval 255). Throws Error(kIo) on malformed input.
Image read_ppm(std::istream& in);
Image read_ppm(const std::string& path);
void write_ppm(std::ostream& out, const Image& img);
void write_ppm(const std::string& path, const Image& img);

}  // namespace ctrect
