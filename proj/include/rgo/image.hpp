#pragma once

#include <cstdint>
#include <vector>

#include "rgo/common.hpp"

namespace rgo {

// Row-major single-channel image, intensities in [0,1].
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  GrayImage() = default;
  GrayImage(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

  double& at(int v, int u) { return data[static_cast<size_t>(v) * width + u]; }
  double at(int v, int u) const {
    return data[static_cast<size_t>(v) * width + u];
  }
  bool same_size(const GrayImage& o) const {
    return width == o.width && height == o.height;
  }
  // Bilinear sample with clamp-to-border policy.
  double sample(double u, double v) const;
};

// Interleaved 8-bit RGB.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;  // 3 * width * height

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h * 3, 0) {}

  uint8_t* px(int v, int u) { return &data[(static_cast<size_t>(v) * width + u) * 3]; }
  const uint8_t* px(int v, int u) const {
    return &data[(static_cast<size_t>(v) * width + u) * 3];
  }
};

// Per-pixel HSV, H in [0,360), S and V in [0,1].
struct HsvImage {
  int width = 0;
  int height = 0;
  std::vector<double> h, s, v;

  HsvImage() = default;
  HsvImage(int w, int h_) : width(w), height(h_) {
    size_t n = static_cast<size_t>(w) * h_;
    h.assign(n, 0.0);
    s.assign(n, 0.0);
    v.assign(n, 0.0);
  }
  size_t idx(int row, int col) const { return static_cast<size_t>(row) * width + col; }
};

// Semantic label image: 0 = background, 1 = floor, >= 2 = obstacle instance id.
struct LabelImage {
  int width = 0;
  int height = 0;
  std::vector<uint16_t> data;

  LabelImage() = default;
  LabelImage(int w, int h, uint16_t fill = 0)
      : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

  uint16_t& at(int v, int u) { return data[static_cast<size_t>(v) * width + u]; }
  uint16_t at(int v, int u) const {
    return data[static_cast<size_t>(v) * width + u];
  }
};

// Binary mask (1 = set).
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;

  BinaryMask() = default;
  BinaryMask(int w, int h, uint8_t fill = 0)
      : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

  uint8_t& at(int v, int u) { return data[static_cast<size_t>(v) * width + u]; }
  uint8_t at(int v, int u) const {
    return data[static_cast<size_t>(v) * width + u];
  }
  bool same_size(const BinaryMask& o) const {
    return width == o.width && height == o.height;
  }
};

// Luminance conversion, fixed weights 0.299/0.587/0.114.
GrayImage to_gray(const RgbImage& rgb);

HsvImage to_hsv(const RgbImage& rgb);

// Length-k line kernel at `angle_deg`, convolved with clamp borders. k = 0 is
// a no-op; k must otherwise be odd.
RgbImage motion_blur(const RgbImage& img, int k, double angle_deg);

}  // namespace rgo
