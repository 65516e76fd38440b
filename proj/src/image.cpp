#include "rgo/image.hpp"

#include <algorithm>
#include <cstdio>

namespace rgo {

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

double GrayImage::sample(double u, double v) const {
  // Clamp the sampling location so border reads repeat the edge pixel.
  u = std::clamp(u, 0.0, static_cast<double>(width - 1));
  v = std::clamp(v, 0.0, static_cast<double>(height - 1));
  int u0 = static_cast<int>(std::floor(u));
  int v0 = static_cast<int>(std::floor(v));
  int u1 = std::min(u0 + 1, width - 1);
  int v1 = std::min(v0 + 1, height - 1);
  double a = u - u0;
  double b = v - v0;
  double top = (1.0 - a) * at(v0, u0) + a * at(v0, u1);
  double bot = (1.0 - a) * at(v1, u0) + a * at(v1, u1);
  return (1.0 - b) * top + b * bot;
}

GrayImage to_gray(const RgbImage& rgb) {
  GrayImage g(rgb.width, rgb.height);
  for (int v = 0; v < rgb.height; ++v) {
    for (int u = 0; u < rgb.width; ++u) {
      const uint8_t* p = rgb.px(v, u);
      g.at(v, u) = (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0;
    }
  }
  return g;
}

HsvImage to_hsv(const RgbImage& rgb) {
  HsvImage out(rgb.width, rgb.height);
  for (int v = 0; v < rgb.height; ++v) {
    for (int u = 0; u < rgb.width; ++u) {
      const uint8_t* p = rgb.px(v, u);
      double r = p[0] / 255.0, g = p[1] / 255.0, b = p[2] / 255.0;
      double mx = std::max({r, g, b});
      double mn = std::min({r, g, b});
      double c = mx - mn;
      double h = 0.0;
      if (c > 0.0) {
        if (mx == r)
          h = 60.0 * std::fmod((g - b) / c + 6.0, 6.0);
        else if (mx == g)
          h = 60.0 * ((b - r) / c + 2.0);
        else
          h = 60.0 * ((r - g) / c + 4.0);
      }
      if (h >= 360.0) h -= 360.0;
      size_t i = out.idx(v, u);
      out.h[i] = h;
      out.s[i] = mx > 0.0 ? c / mx : 0.0;
      out.v[i] = mx;
    }
  }
  return out;
}

RgbImage motion_blur(const RgbImage& img, int k, double angle_deg) {
  if (k == 0) return img;
  if (k < 0 || k % 2 == 0) fail(ErrorCode::kInvalidArgument, "blur kernel size must be odd or 0");

  // Rasterize the line PSF into a k x k kernel with bilinear splatting.
  std::vector<double> kernel(static_cast<size_t>(k) * k, 0.0);
  double c = (k - 1) / 2.0;
  double rad = angle_deg * M_PI / 180.0;
  double dx = std::cos(rad), dy = std::sin(rad);
  int steps = 4 * k;
  for (int s = 0; s <= steps; ++s) {
    double t = -c + (2.0 * c) * s / steps;
    double x = c + t * dx, y = c + t * dy;
    int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
    double a = x - x0, b = y - y0;
    auto add = [&](int yy, int xx, double w) {
      if (xx >= 0 && xx < k && yy >= 0 && yy < k) kernel[static_cast<size_t>(yy) * k + xx] += w;
    };
    add(y0, x0, (1 - a) * (1 - b));
    add(y0, x0 + 1, a * (1 - b));
    add(y0 + 1, x0, (1 - a) * b);
    add(y0 + 1, x0 + 1, a * b);
  }
  double sum = 0.0;
  for (double w : kernel) sum += w;
  for (double& w : kernel) w /= sum;

  RgbImage out(img.width, img.height);
  int r = k / 2;
  for (int v = 0; v < img.height; ++v) {
    for (int u = 0; u < img.width; ++u) {
      double acc[3] = {0, 0, 0};
      for (int ky = 0; ky < k; ++ky) {
        int sv = std::clamp(v + ky - r, 0, img.height - 1);
        for (int kx = 0; kx < k; ++kx) {
          int su = std::clamp(u + kx - r, 0, img.width - 1);
          double w = kernel[static_cast<size_t>(ky) * k + kx];
          const uint8_t* p = img.px(sv, su);
          acc[0] += w * p[0];
          acc[1] += w * p[1];
          acc[2] += w * p[2];
        }
      }
      uint8_t* q = out.px(v, u);
      for (int ch = 0; ch < 3; ++ch)
        q[ch] = static_cast<uint8_t>(std::clamp(std::lround(acc[ch]), 0l, 255l));
    }
  }
  return out;
}

}  // namespace rgo
