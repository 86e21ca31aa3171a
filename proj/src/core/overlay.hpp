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

#ifndef MASKTEXT_CORE_OVERLAY_HPP_
#define MASKTEXT_CORE_OVERLAY_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <opencv2/core.hpp>

#include "core/dataset_io.hpp"

namespace masktext {

struct OverlayMarker {
  std::uint16_t class_index = 0;
  cv::Point center;  // in overlay image coordinates
  cv::Vec3b color;   // BGR
};

// Pre | post | mask panels side by side, 3x3 grid lines on every panel,
// one centroid marker per quadruple on the mask panel and a caption strip.
struct Overlay {
  cv::Mat image;  // CV_8UC3, BGR
  cv::Rect mask_panel;
  std::vector<OverlayMarker> markers;
};

// Marker color for the k-th quadruple of a record.
cv::Vec3b MarkerColor(std::size_t k);

// Throws DecodeError when the pre/post images cannot be read.
Overlay RenderOverlay(const DatasetManifest& manifest, const ManifestEntry& entry,
                      const ChangeMask& mask, const MultimodalRecord& record);

// Renders and writes <out_dir>/<image_id>.png. Throws IoError on write failure.
std::filesystem::path WriteOverlay(const DatasetManifest& manifest,
                                   const ManifestEntry& entry,
                                   const std::filesystem::path& out_dir);

}  // namespace masktext

#endif  // MASKTEXT_CORE_OVERLAY_HPP_
