#include "rgo/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>

namespace rgo {
namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
  FILE* f = std::fopen(path.c_str(), mode);
  if (!f) fail(ErrorCode::kMissingFile, "cannot open " + path);
  return FilePtr(f);
}

void write_png(const std::string& path, int width, int height, int color_type,
               int bit_depth, const std::vector<png_bytep>& rows) {
  FilePtr f = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::kIoFailure, "png write failed: " + path);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);  // rows hold native-endian uint16
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  FilePtr file;
  int width = 0, height = 0, color = 0, depth = 0;

  explicit PngReader(const std::string& path) : file(open_file(path, "rb")) {
    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
      png_destroy_read_struct(&png, &info, nullptr);
      fail(ErrorCode::kIoFailure, "png read failed: " + path);
    }
    png_init_io(png, file.get());
    png_read_info(png, info);
    width = png_get_image_width(png, info);
    height = png_get_image_height(png, info);
    color = png_get_color_type(png, info);
    depth = png_get_bit_depth(png, info);
  }
  ~PngReader() {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
  }
};

}  // namespace

void write_png_rgb8(const std::string& path, const RgbImage& img) {
  std::vector<png_bytep> rows(img.height);
  for (int v = 0; v < img.height; ++v)
    rows[v] = const_cast<png_bytep>(&img.data[static_cast<size_t>(v) * img.width * 3]);
  write_png(path, img.width, img.height, PNG_COLOR_TYPE_RGB, 8, rows);
}

RgbImage read_png_rgb8(const std::string& path) {
  PngReader r(path);
  if (setjmp(png_jmpbuf(r.png))) fail(ErrorCode::kIoFailure, "png read failed: " + path);
  if (r.depth == 16) png_set_strip_16(r.png);
  if (r.color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
  if (r.color == PNG_COLOR_TYPE_GRAY || r.color == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(r.png);
  png_set_strip_alpha(r.png);
  png_read_update_info(r.png, r.info);
  RgbImage img(r.width, r.height);
  std::vector<png_bytep> rows(r.height);
  for (int v = 0; v < r.height; ++v)
    rows[v] = &img.data[static_cast<size_t>(v) * r.width * 3];
  png_read_image(r.png, rows.data());
  return img;
}

void write_png_gray8(const std::string& path, const GrayImage& img) {
  std::vector<uint8_t> bytes(static_cast<size_t>(img.width) * img.height);
  for (size_t i = 0; i < bytes.size(); ++i)
    bytes[i] = static_cast<uint8_t>(std::lround(std::clamp(img.data[i], 0.0, 1.0) * 255.0));
  std::vector<png_bytep> rows(img.height);
  for (int v = 0; v < img.height; ++v) rows[v] = &bytes[static_cast<size_t>(v) * img.width];
  write_png(path, img.width, img.height, PNG_COLOR_TYPE_GRAY, 8, rows);
}

GrayImage read_png_gray8(const std::string& path) {
  PngReader r(path);
  if (setjmp(png_jmpbuf(r.png))) fail(ErrorCode::kIoFailure, "png read failed: " + path);
  if (r.depth == 16) png_set_strip_16(r.png);
  if (r.color != PNG_COLOR_TYPE_GRAY) png_set_rgb_to_gray(r.png, 1, -1, -1);
  png_set_strip_alpha(r.png);
  png_read_update_info(r.png, r.info);
  std::vector<uint8_t> bytes(static_cast<size_t>(r.width) * r.height);
  std::vector<png_bytep> rows(r.height);
  for (int v = 0; v < r.height; ++v) rows[v] = &bytes[static_cast<size_t>(v) * r.width];
  png_read_image(r.png, rows.data());
  GrayImage img(r.width, r.height);
  for (size_t i = 0; i < bytes.size(); ++i) img.data[i] = bytes[i] / 255.0;
  return img;
}

void write_png_gray16(const std::string& path, const std::vector<uint16_t>& data,
                      int width, int height) {
  if (data.size() != static_cast<size_t>(width) * height)
    fail(ErrorCode::kSizeMismatch, "gray16 buffer size mismatch");
  std::vector<png_bytep> rows(height);
  for (int v = 0; v < height; ++v)
    rows[v] = const_cast<png_bytep>(
        reinterpret_cast<const png_byte*>(&data[static_cast<size_t>(v) * width]));
  write_png(path, width, height, PNG_COLOR_TYPE_GRAY, 16, rows);
}

std::vector<uint16_t> read_png_gray16(const std::string& path, int* width, int* height) {
  PngReader r(path);
  if (setjmp(png_jmpbuf(r.png))) fail(ErrorCode::kIoFailure, "png read failed: " + path);
  if (r.depth != 16 || r.color != PNG_COLOR_TYPE_GRAY)
    fail(ErrorCode::kIoFailure, "expected 16-bit gray png: " + path);
  png_set_swap(r.png);
  png_read_update_info(r.png, r.info);
  std::vector<uint16_t> data(static_cast<size_t>(r.width) * r.height);
  std::vector<png_bytep> rows(r.height);
  for (int v = 0; v < r.height; ++v)
    rows[v] = reinterpret_cast<png_byte*>(&data[static_cast<size_t>(v) * r.width]);
  png_read_image(r.png, rows.data());
  *width = r.width;
  *height = r.height;
  return data;
}

void write_png_label(const std::string& path, const LabelImage& img) {
  std::vector<uint8_t> bytes(static_cast<size_t>(img.width) * img.height);
  for (size_t i = 0; i < bytes.size(); ++i) {
    if (img.data[i] > 255) fail(ErrorCode::kInvalidArgument, "label id exceeds 255");
    bytes[i] = static_cast<uint8_t>(img.data[i]);
  }
  std::vector<png_bytep> rows(img.height);
  for (int v = 0; v < img.height; ++v) rows[v] = &bytes[static_cast<size_t>(v) * img.width];
  write_png(path, img.width, img.height, PNG_COLOR_TYPE_GRAY, 8, rows);
}

LabelImage read_png_label(const std::string& path) {
  PngReader r(path);
  if (setjmp(png_jmpbuf(r.png))) fail(ErrorCode::kIoFailure, "png read failed: " + path);
  if (r.color != PNG_COLOR_TYPE_GRAY || r.depth != 8)
    fail(ErrorCode::kIoFailure, "expected 8-bit gray label png: " + path);
  png_read_update_info(r.png, r.info);
  std::vector<uint8_t> bytes(static_cast<size_t>(r.width) * r.height);
  std::vector<png_bytep> rows(r.height);
  for (int v = 0; v < r.height; ++v) rows[v] = &bytes[static_cast<size_t>(v) * r.width];
  png_read_image(r.png, rows.data());
  LabelImage img(r.width, r.height);
  for (size_t i = 0; i < bytes.size(); ++i) img.data[i] = bytes[i];
  return img;
}

}  // namespace rgo
