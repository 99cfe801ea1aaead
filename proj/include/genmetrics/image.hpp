// Copyright 2026 The genmetrics Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "genmetrics/error.hpp"

namespace genmetrics {

// Single-channel image, row-major, intensities in [0, 1].
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> pixels;

  double at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
};

// Bilinear resampling with pixel-center alignment; a same-size resize is the
// identity.
inline GrayImage ResizeBilinear(const GrayImage& src, std::size_t out_width,
                                std::size_t out_height) {
  if (src.width == 0 || src.height == 0 || out_width == 0 || out_height == 0) {
    throw Error(ErrorCode::kZeroDimension, "cannot resample an empty image");
  }
  GrayImage out{out_width, out_height,
                std::vector<double>(out_width * out_height)};
  const double sx = static_cast<double>(src.width) / out_width;
  const double sy = static_cast<double>(src.height) / out_height;
  auto source_coord = [](std::size_t dst, double scale, std::size_t limit,
                         std::size_t& i0, std::size_t& i1, double& t) {
    double s = (static_cast<double>(dst) + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(limit - 1));
    i0 = static_cast<std::size_t>(std::floor(s));
    i1 = std::min(i0 + 1, limit - 1);
    t = s - static_cast<double>(i0);
  };
  for (std::size_t y = 0; y < out_height; ++y) {
    std::size_t y0, y1;
    double ty;
    source_coord(y, sy, src.height, y0, y1, ty);
    for (std::size_t x = 0; x < out_width; ++x) {
      std::size_t x0, x1;
      double tx;
      source_coord(x, sx, src.width, x0, x1, tx);
      const double top = src.at(x0, y0) * (1.0 - tx) + src.at(x1, y0) * tx;
      const double bottom = src.at(x0, y1) * (1.0 - tx) + src.at(x1, y1) * tx;
      out.pixels[y * out_width + x] =
          std::clamp(top * (1.0 - ty) + bottom * ty, 0.0, 1.0);
    }
  }
  return out;
}

namespace image_internal {

inline GrayImage DecodePng(const std::vector<unsigned char>& bytes,
                           const std::string& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::kDecodeFailure, image.message, path);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  const bool wide = (image.format & PNG_FORMAT_FLAG_LINEAR) != 0;
  // 16-bit sources are read as linear 16-bit so no gamma curve is applied.
  if (wide) {
    image.format = color ? PNG_FORMAT_LINEAR_RGB : PNG_FORMAT_LINEAR_Y;
  } else {
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  }
  const std::size_t channels = color ? 3 : 1;
  const std::size_t count =
      static_cast<std::size_t>(image.width) * image.height * channels;
  GrayImage out{image.width, image.height, {}};
  out.pixels.resize(static_cast<std::size_t>(image.width) * image.height);
  auto store = [&](auto* buffer, double scale) {
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
      if (channels == 1) {
        out.pixels[i] = buffer[i] / scale;
      } else {
        const double r = buffer[3 * i], g = buffer[3 * i + 1],
                     b = buffer[3 * i + 2];
        out.pixels[i] =
            std::clamp((0.299 * r + 0.587 * g + 0.114 * b) / scale, 0.0, 1.0);
      }
    }
  };
  bool ok;
  if (wide) {
    std::vector<png_uint_16> buffer(count);
    ok = png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr);
    if (ok) store(buffer.data(), 65535.0);
  } else {
    std::vector<png_byte> buffer(count);
    ok = png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr);
    if (ok) store(buffer.data(), 255.0);
  }
  if (!ok) {
    std::string message = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kDecodeFailure, message, path);
  }
  return out;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

extern "C" inline void JpegErrorExit(j_common_ptr info) {
  auto* manager = reinterpret_cast<JpegErrorManager*>(info->err);
  (*info->err->format_message)(info, manager->message);
  std::longjmp(manager->jump, 1);
}

// Only trivially destructible state lives between setjmp and longjmp here.
inline bool DecodeJpegInto(const std::vector<unsigned char>& bytes,
                           std::vector<unsigned char>& pixels,
                           JDIMENSION& width, JDIMENSION& height,
                           JpegErrorManager& errors) {
  jpeg_decompress_struct info;
  info.err = jpeg_std_error(&errors.base);
  errors.base.error_exit = JpegErrorExit;
  errors.message[0] = '\0';
  if (setjmp(errors.jump)) {
    jpeg_destroy_decompress(&info);
    return false;
  }
  jpeg_create_decompress(&info);
  jpeg_mem_src(&info, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&info, TRUE);
  info.out_color_space = JCS_GRAYSCALE;
  jpeg_start_decompress(&info);
  width = info.output_width;
  height = info.output_height;
  pixels.resize(static_cast<std::size_t>(width) * height);
  while (info.output_scanline < info.output_height) {
    JSAMPROW row = pixels.data() + static_cast<std::size_t>(info.output_scanline) * width;
    jpeg_read_scanlines(&info, &row, 1);
  }
  jpeg_finish_decompress(&info);
  jpeg_destroy_decompress(&info);
  return true;
}

inline GrayImage DecodeJpeg(const std::vector<unsigned char>& bytes,
                            const std::string& path) {
  std::vector<unsigned char> pixels;
  JDIMENSION width = 0, height = 0;
  JpegErrorManager errors;
  if (!DecodeJpegInto(bytes, pixels, width, height, errors)) {
    throw Error(ErrorCode::kDecodeFailure, errors.message, path);
  }
  GrayImage out{width, height, std::vector<double>(pixels.size())};
  for (std::size_t i = 0; i < pixels.size(); ++i) out.pixels[i] = pixels[i] / 255.0;
  return out;
}

}  // namespace image_internal

// Decodes a PNG or JPEG (sniffed from the leading bytes) to luminance.
inline GrayImage DecodeGrayImage(const std::vector<unsigned char>& bytes,
                                 const std::string& path = {}) {
  static constexpr unsigned char kPng[] = {0x89, 'P', 'N', 'G'};
  GrayImage image;
  if (bytes.size() >= 4 && std::equal(kPng, kPng + 4, bytes.begin())) {
    image = image_internal::DecodePng(bytes, path);
  } else if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 &&
             bytes[2] == 0xFF) {
    image = image_internal::DecodeJpeg(bytes, path);
  } else {
    throw Error(ErrorCode::kDecodeFailure, "not a PNG or JPEG stream", path);
  }
  if (image.width == 0 || image.height == 0) {
    throw Error(ErrorCode::kZeroDimension, "decoded image is empty", path);
  }
  return image;
}

// Loads `path` as grayscale and resamples it to target_side x target_side.
inline GrayImage LoadGrayImage(const std::string& path,
                               std::size_t target_side = 224) {
  if (target_side == 0) {
    throw Error(ErrorCode::kZeroDimension, "target side must be positive", path);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open image", path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return ResizeBilinear(DecodeGrayImage(bytes, path), target_side, target_side);
}

// 8-bit grayscale PNG writer, used by tools and tests to produce fixtures.
inline void WriteGrayPng(const GrayImage& image, const std::string& path) {
  std::vector<png_byte> buffer(image.pixels.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    buffer[i] = static_cast<png_byte>(
        std::lround(std::clamp(image.pixels[i], 0.0, 1.0) * 255.0));
  }
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&png, path.c_str(), 0, buffer.data(), 0,
                               nullptr)) {
    throw Error(ErrorCode::kIoFailure, png.message, path);
  }
}

}  // namespace genmetrics
