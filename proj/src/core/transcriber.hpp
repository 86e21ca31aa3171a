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

#ifndef MASKTEXT_CORE_TRANSCRIBER_HPP_
#define MASKTEXT_CORE_TRANSCRIBER_HPP_

#include <cstdint>
#include <vector>

#include "core/core_types.hpp"

namespace masktext {

// Pixel-area cut points for the quantity descriptor. Defaults were calibrated
// for 512x512 aerial tiles; other resolutions should configure their own.
struct QuantityThresholds {
  std::uint64_t t1 = 800;
  std::uint64_t t2 = 4000;
  std::uint64_t t3 = 8000;

  // Throws InvalidArgument unless 0 < t1 < t2 < t3.
  void Validate() const;
};

struct Centroid {
  double x = 0.0;  // column
  double y = 0.0;  // row
};

// Mean foreground coordinate (0-based, origin top-left). Throws EmptyMask.
Centroid ComputeCentroid(const BinaryMask& mask);

// 3x3 grid cell of a point; intervals are half-open, so a point exactly on
// H/3 is "center" and one exactly on 2H/3 is "south".
Direction ClassifyDirection(double cx, double cy, int width, int height);

Quantity ClassifyQuantity(std::uint64_t pixel_count,
                          const QuantityThresholds& thresholds);

// One quadruple per non-empty class, in class-table order. Throws
// InvalidArgument when the mask fails validation.
std::vector<SemanticQuadruple> TranscribeMask(
    const ChangeMask& mask, const QuantityThresholds& thresholds = {});

struct BoundingBox {
  int x0 = 0, y0 = 0;  // inclusive
  int x1 = 0, y1 = 0;  // inclusive

  bool operator==(const BoundingBox&) const = default;
};

struct RegionStat {
  std::uint64_t area = 0;
  BoundingBox bbox;
  Centroid centroid;
};

enum class Connectivity { kFour = 4, kEight = 8 };

// Connected components ordered by their first pixel in raster order.
std::vector<RegionStat> RegionStats(const BinaryMask& mask,
                                    Connectivity connectivity = Connectivity::kFour);

}  // namespace masktext

#endif  // MASKTEXT_CORE_TRANSCRIBER_HPP_
