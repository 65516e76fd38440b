#pragma once

#include <string>
#include <vector>

#include "rgo/image.hpp"

namespace rgo {

void write_png_rgb8(const std::string& path, const RgbImage& img);
RgbImage read_png_rgb8(const std::string& path);

// 8-bit grayscale; values are round(x * 255) of the [0,1] response.
void write_png_gray8(const std::string& path, const GrayImage& img);
GrayImage read_png_gray8(const std::string& path);

// 16-bit grayscale; values are round(x * 65535).
void write_png_gray16(const std::string& path, const std::vector<uint16_t>& data,
                      int width, int height);
std::vector<uint16_t> read_png_gray16(const std::string& path, int* width, int* height);

// Label images persist as 8-bit gray with raw label values (<= 255 instances).
void write_png_label(const std::string& path, const LabelImage& img);
LabelImage read_png_label(const std::string& path);

}  // namespace rgo
