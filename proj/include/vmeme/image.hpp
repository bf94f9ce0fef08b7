#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace vmeme {

// Interleaved 8-bit RGB raster, row-major.
class Image {
 public:
  Image() = default;
  Image(int width, int height) : width_(width), height_(height), rgb_(static_cast<std::size_t>(width) * height * 3, 0) {}
  Image(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return rgb_.empty(); }

  std::uint8_t* at(int x, int y) { return &rgb_[(static_cast<std::size_t>(y) * width_ + x) * 3]; }
  const std::uint8_t* at(int x, int y) const { return &rgb_[(static_cast<std::size_t>(y) * width_ + x) * 3]; }
  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    auto* p = at(x, y);
    p[0] = r;
    p[1] = g;
    p[2] = b;
  }

  std::vector<std::uint8_t>& data() { return rgb_; }
  const std::vector<std::uint8_t>& data() const { return rgb_; }

  Image crop(int x0, int y0, int w, int h) const;
  Image flipped_horizontal() const;
  Image flipped_vertical() const;

  bool operator==(const Image& other) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> rgb_;
};

// Rec. 601 luma, rounded.
inline std::uint8_t luma(const std::uint8_t* p) {
  return static_cast<std::uint8_t>((299 * p[0] + 587 * p[1] + 114 * p[2] + 500) / 1000);
}

// Bilinear resample to the requested size (pixel-center aligned).
Image resize_bilinear(const Image& src, int width, int height);

// PNG (via libpng) or binary PPM, chosen by extension / magic.
Image read_image(const std::string& path);
void write_png(const std::string& path, const Image& img);
void write_ppm(const std::string& path, const Image& img);

}  // namespace vmeme
