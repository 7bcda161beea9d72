#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace bsv {

/// Row-major image, pixel (u, v) at index v * width + u.
template <typename T>
struct Image {
  int width = 0;
  int height = 0;
  std::vector<T> pixels;

  Image() = default;
  Image(int w, int h, T fill = T{})
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(width) + static_cast<std::size_t>(u);
  }
  T& at(int u, int v) { return pixels[index(u, v)]; }
  const T& at(int u, int v) const { return pixels[index(u, v)]; }
  bool contains(int u, int v) const { return u >= 0 && v >= 0 && u < width && v < height; }
  std::size_t size() const { return pixels.size(); }
};

/// Depth along the optical axis in meters, 0 where nothing was hit.
using DepthImage = Image<double>;

/// One byte per pixel. Segmentation masks store SegmentLabel ordinals; raw
/// 24-part masks store part ids with 255 as background.
using ByteImage = Image<std::uint8_t>;

/// Depth as float32 little-endian after a text header
/// ("BSVDEPTH 1", "width height", "fx fy cx cy").
void write_depth_image(const std::filesystem::path& path, const DepthImage& depth, double fx,
                       double fy, double cx, double cy);
/// `intrinsics`, when given, receives fx, fy, cx, cy from the header.
DepthImage read_depth_image(const std::filesystem::path& path,
                            std::array<double, 4>* intrinsics = nullptr);

/// Raw byte grid after a text header ("BSVMASK 1", "width height").
void write_byte_image(const std::filesystem::path& path, const ByteImage& image);
ByteImage read_byte_image(const std::filesystem::path& path);

}  // namespace bsv
