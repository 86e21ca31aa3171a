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

#include "core/transcriber.hpp"

#include <algorithm>
#include <utility>

#include "core/errors.hpp"

namespace masktext {

namespace {

enum class Band { kLow, kMid, kHigh };

Band SplitAxis(double c, int extent) {
  const double first = static_cast<double>(extent) / 3.0;
  const double second = 2.0 * static_cast<double>(extent) / 3.0;
  if (c < first) return Band::kLow;
  if (c < second) return Band::kMid;
  return Band::kHigh;
}

}  // namespace

void QuantityThresholds::Validate() const {
  if (!(0 < t1 && t1 < t2 && t2 < t3)) {
    throw Error(ErrorCode::kInvalidArgument,
                "quantity thresholds must satisfy 0 < t1 < t2 < t3, got " +
                    std::to_string(t1) + ", " + std::to_string(t2) + ", " +
                    std::to_string(t3));
  }
}

Centroid ComputeCentroid(const BinaryMask& mask) {
  if (mask.foreground_count() == 0) {
    throw Error(ErrorCode::kEmptyMask, "centroid of an empty mask");
  }
  // Integer sums are exact for any raster that fits in memory.
  std::uint64_t sx = 0, sy = 0;
  const auto bits = mask.bits();
  const int w = mask.width();
  for (int y = 0; y < mask.height(); ++y) {
    const std::uint8_t* row = bits.data() + static_cast<std::size_t>(y) * w;
    std::uint64_t row_count = 0;
    for (int x = 0; x < w; ++x) {
      if (row[x]) {
        sx += static_cast<std::uint64_t>(x);
        ++row_count;
      }
    }
    sy += row_count * static_cast<std::uint64_t>(y);
  }
  const double n = static_cast<double>(mask.foreground_count());
  return {static_cast<double>(sx) / n, static_cast<double>(sy) / n};
}

Direction ClassifyDirection(double cx, double cy, int width, int height) {
  const Band vertical = SplitAxis(cy, height);
  const Band horizontal = SplitAxis(cx, width);
  switch (vertical) {
    case Band::kLow:
      return horizontal == Band::kLow    ? Direction::kNorthwest
             : horizontal == Band::kHigh ? Direction::kNortheast
                                         : Direction::kNorth;
    case Band::kMid:
      return horizontal == Band::kLow    ? Direction::kWest
             : horizontal == Band::kHigh ? Direction::kEast
                                         : Direction::kCenter;
    case Band::kHigh:
      return horizontal == Band::kLow    ? Direction::kSouthwest
             : horizontal == Band::kHigh ? Direction::kSoutheast
                                         : Direction::kSouth;
  }
  return Direction::kCenter;
}

Quantity ClassifyQuantity(std::uint64_t pixel_count,
                          const QuantityThresholds& thresholds) {
  if (pixel_count < thresholds.t1) return Quantity::kSingle;
  if (pixel_count < thresholds.t2) return Quantity::kFew;
  if (pixel_count < thresholds.t3) return Quantity::kSeveral;
  return Quantity::kMultiple;
}

std::vector<SemanticQuadruple> TranscribeMask(
    const ChangeMask& mask, const QuantityThresholds& thresholds) {
  thresholds.Validate();
  if (auto findings = ValidateChangeMask(mask); !findings.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid change mask: " + findings.front().message);
  }

  const auto& table = mask.class_table();
  if (table.empty()) return {};

  // label -> slot in the class table
  std::vector<int> slot(65536, -1);
  for (std::size_t i = 0; i < table.size(); ++i) {
    slot[table[i].class_index] = static_cast<int>(i);
  }

  struct Sums {
    std::uint64_t n = 0, sx = 0, sy = 0;
  };
  std::vector<Sums> sums(table.size());
  const auto labels = mask.labels();
  const int w = mask.width();
  for (int y = 0; y < mask.height(); ++y) {
    const std::uint16_t* row = labels.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      if (row[x] == 0) continue;
      Sums& s = sums[static_cast<std::size_t>(slot[row[x]])];
      ++s.n;
      s.sx += static_cast<std::uint64_t>(x);
      s.sy += static_cast<std::uint64_t>(y);
    }
  }

  std::vector<SemanticQuadruple> out;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const Sums& s = sums[i];
    if (s.n == 0) continue;
    SemanticQuadruple q;
    q.class_index = table[i].class_index;
    q.category = table[i].category;
    q.change_type = table[i].change_type;
    q.pixel_count = s.n;
    q.centroid_x = static_cast<double>(s.sx) / static_cast<double>(s.n);
    q.centroid_y = static_cast<double>(s.sy) / static_cast<double>(s.n);
    q.location =
        ClassifyDirection(q.centroid_x, q.centroid_y, w, mask.height());
    q.quantity = ClassifyQuantity(s.n, thresholds);
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<RegionStat> RegionStats(const BinaryMask& mask,
                                    Connectivity connectivity) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
  std::vector<std::pair<int, int>> stack;
  std::vector<RegionStat> regions;

  static constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  const int n_neighbors = connectivity == Connectivity::kFour ? 4 : 8;

  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      const std::size_t idx0 = static_cast<std::size_t>(y0) * w + x0;
      if (!mask.at(x0, y0) || seen[idx0]) continue;

      RegionStat r;
      r.bbox = {x0, y0, x0, y0};
      std::uint64_t sx = 0, sy = 0;
      seen[idx0] = 1;
      stack.assign(1, {x0, y0});
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        ++r.area;
        sx += static_cast<std::uint64_t>(x);
        sy += static_cast<std::uint64_t>(y);
        r.bbox.x0 = std::min(r.bbox.x0, x);
        r.bbox.y0 = std::min(r.bbox.y0, y);
        r.bbox.x1 = std::max(r.bbox.x1, x);
        r.bbox.y1 = std::max(r.bbox.y1, y);
        for (int k = 0; k < n_neighbors; ++k) {
          const int nx = x + kDx[k];
          const int ny = y + kDy[k];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
          if (seen[nidx] || !mask.at(nx, ny)) continue;
          seen[nidx] = 1;
          stack.emplace_back(nx, ny);
        }
      }
      const double n = static_cast<double>(r.area);
      r.centroid = {static_cast<double>(sx) / n, static_cast<double>(sy) / n};
      regions.push_back(r);
    }
  }
  return regions;
}

}  // namespace masktext
