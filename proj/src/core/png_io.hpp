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

#ifndef MASKTEXT_CORE_PNG_IO_HPP_
#define MASKTEXT_CORE_PNG_IO_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace masktext {

// Raw PNG samples. Indexed images keep their palette indices (channels = 1);
// grayscale keeps its values; RGB(A) is reduced to RGB (channels = 3).
struct RawImage {
  int width = 0;
  int height = 0;
  int channels = 1;
  bool indexed = false;
  std::vector<std::uint16_t> samples;

  std::uint16_t at(int x, int y, int c = 0) const {
    return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

// Throws MissingFile if the path does not exist, DecodeError otherwise.
RawImage ReadPng(const std::filesystem::path& path);

// Throws IoError.
void WriteGrayPng(const std::filesystem::path& path, int width, int height,
                  const std::vector<std::uint8_t>& values);
void WriteIndexedPng(const std::filesystem::path& path, int width, int height,
                     const std::vector<std::uint8_t>& indices,
                     const std::vector<std::array<std::uint8_t, 3>>& palette);
void WriteRgbPng(const std::filesystem::path& path, int width, int height,
                 const std::vector<std::uint8_t>& rgb);

}  // namespace masktext

#endif  // MASKTEXT_CORE_PNG_IO_HPP_
