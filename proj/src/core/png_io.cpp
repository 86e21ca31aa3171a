/* Copyright 2026 The MaskText Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "core/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "core/errors.hpp"

namespace masktext {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct ErrorSink {
  char message[256] = {0};
};

void OnPngError(png_structp png, png_const_charp msg) {
  auto* sink = static_cast<ErrorSink*>(png_get_error_ptr(png));
  if (sink) std::snprintf(sink->message, sizeof(sink->message), "%s", msg);
  png_longjmp(png, 1);
}

void OnPngWarning(png_structp, png_const_charp) {}

struct Header {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
};

// Only trivially destructible locals live in the setjmp frames below.
bool DecodeInto(std::FILE* fp, Header* header, std::vector<std::uint8_t>* rows,
                std::size_t* row_bytes, int* channels, ErrorSink* sink) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, sink,
                                           OnPngError, OnPngWarning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  png_bytep* row_ptrs = nullptr;
  if (setjmp(png_jmpbuf(png))) {
    std::free(row_ptrs);
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  header->width = png_get_image_width(png, info);
  header->height = png_get_image_height(png, info);
  header->bit_depth = png_get_bit_depth(png, info);
  header->color_type = png_get_color_type(png, info);

  // Low bit depths unpacked to one byte per sample, values unscaled.
  if (header->bit_depth < 8) png_set_packing(png);
  if (header->bit_depth == 16) png_set_swap(png);
  if (header->color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  *row_bytes = png_get_rowbytes(png, info);
  *channels = png_get_channels(png, info);
  rows->resize(*row_bytes * header->height);
  row_ptrs = static_cast<png_bytep*>(
      std::malloc(sizeof(png_bytep) * header->height));
  if (!row_ptrs) png_error(png, "out of memory");
  for (png_uint_32 y = 0; y < header->height; ++y) {
    row_ptrs[y] = rows->data() + y * *row_bytes;
  }
  png_read_image(png, row_ptrs);
  png_read_end(png, nullptr);
  std::free(row_ptrs);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool EncodeFrom(std::FILE* fp, int width, int height, int color_type,
                const std::uint8_t* data, int channels, const png_color* palette,
                int palette_size, ErrorSink* sink) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, sink,
                                            OnPngError, OnPngWarning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  if (palette) png_set_PLTE(png, info, palette, palette_size);
  // Fixed settings keep the encoded bytes reproducible.
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(data + y * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

void Write(const std::filesystem::path& path, int width, int height,
           int color_type, const std::vector<std::uint8_t>& data, int channels,
           const std::vector<std::array<std::uint8_t, 3>>* palette) {
  if (width < 1 || height < 1 ||
      data.size() != static_cast<std::size_t>(width) * height * channels) {
    throw Error(ErrorCode::kInvalidArgument,
                "PNG buffer does not match " + std::to_string(width) + "x" +
                    std::to_string(height) + "x" + std::to_string(channels));
  }
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) {
    throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  }
  std::vector<png_color> plte;
  if (palette) {
    for (const auto& c : *palette) plte.push_back({c[0], c[1], c[2]});
  }
  ErrorSink sink;
  if (!EncodeFrom(fp.get(), width, height, color_type, data.data(), channels,
                  palette ? plte.data() : nullptr,
                  static_cast<int>(plte.size()), &sink)) {
    throw Error(ErrorCode::kIo,
                "failed to encode " + path.string() + ": " + sink.message);
  }
}

}  // namespace

RawImage ReadPng(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kMissingFile, "no such file: " + path.string());
  }
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw Error(ErrorCode::kMissingFile, "cannot open " + path.string());

  png_byte signature[8];
  if (std::fread(signature, 1, 8, fp.get()) != 8 ||
      png_sig_cmp(signature, 0, 8) != 0) {
    throw Error(ErrorCode::kDecode, path.string() + " is not a PNG file");
  }
  std::rewind(fp.get());

  Header header;
  std::vector<std::uint8_t> rows;
  std::size_t row_bytes = 0;
  int channels = 0;
  ErrorSink sink;
  if (!DecodeInto(fp.get(), &header, &rows, &row_bytes, &channels, &sink)) {
    throw Error(ErrorCode::kDecode,
                "failed to decode " + path.string() + ": " + sink.message);
  }

  RawImage img;
  img.width = static_cast<int>(header.width);
  img.height = static_cast<int>(header.height);
  img.indexed = header.color_type == PNG_COLOR_TYPE_PALETTE;
  const bool gray = !(header.color_type & PNG_COLOR_MASK_COLOR) || img.indexed;
  img.channels = gray ? 1 : 3;
  if (channels < img.channels) {
    throw Error(ErrorCode::kDecode, "unexpected channel layout in " + path.string());
  }
  const bool wide = header.bit_depth == 16;
  img.samples.resize(static_cast<std::size_t>(img.width) * img.height * img.channels);
  std::size_t k = 0;
  for (int y = 0; y < img.height; ++y) {
    const std::uint8_t* row = rows.data() + static_cast<std::size_t>(y) * row_bytes;
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        const std::size_t s = static_cast<std::size_t>(x) * channels + c;
        if (wide) {
          std::uint16_t v;
          std::memcpy(&v, row + 2 * s, 2);
          img.samples[k++] = v;
        } else {
          img.samples[k++] = row[s];
        }
      }
    }
  }
  return img;
}

void WriteGrayPng(const std::filesystem::path& path, int width, int height,
                  const std::vector<std::uint8_t>& values) {
  Write(path, width, height, PNG_COLOR_TYPE_GRAY, values, 1, nullptr);
}

void WriteIndexedPng(const std::filesystem::path& path, int width, int height,
                     const std::vector<std::uint8_t>& indices,
                     const std::vector<std::array<std::uint8_t, 3>>& palette) {
  if (palette.empty() || palette.size() > 256) {
    throw Error(ErrorCode::kInvalidArgument, "PNG palette needs 1..256 colors");
  }
  Write(path, width, height, PNG_COLOR_TYPE_PALETTE, indices, 1, &palette);
}

void WriteRgbPng(const std::filesystem::path& path, int width, int height,
                 const std::vector<std::uint8_t>& rgb) {
  Write(path, width, height, PNG_COLOR_TYPE_RGB, rgb, 3, nullptr);
}

}  // namespace masktext
