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

#include "core/overlay.hpp"

#include <cmath>
#include <sstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "core/errors.hpp"

namespace masktext {

namespace {

constexpr int kGap = 4;
constexpr int kFont = cv::FONT_HERSHEY_SIMPLEX;
constexpr double kFontScale = 0.5;
constexpr int kLineHeight = 20;

// Class fill colors on the mask panel (BGR), indexed by class_index.
cv::Vec3b FillColor(std::uint16_t class_index) {
  static const cv::Vec3b kFills[] = {
      {90, 90, 160}, {90, 150, 90}, {160, 110, 70}, {70, 140, 150},
      {140, 80, 140}, {60, 120, 190}, {150, 150, 60}, {110, 110, 110},
  };
  return kFills[class_index % (sizeof(kFills) / sizeof(kFills[0]))];
}

cv::Mat LoadPanel(const std::filesystem::path& path, cv::Size size) {
  cv::Mat img = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (img.empty()) {
    throw Error(ErrorCode::kDecode, "cannot decode image " + path.string());
  }
  if (img.size() != size) cv::resize(img, img, size, 0, 0, cv::INTER_AREA);
  return img;
}

void DrawGrid(cv::Mat& panel) {
  const cv::Scalar grid(255, 255, 255);
  for (int k = 1; k <= 2; ++k) {
    const int x = static_cast<int>(std::lround(panel.cols * k / 3.0));
    const int y = static_cast<int>(std::lround(panel.rows * k / 3.0));
    cv::line(panel, {x, 0}, {x, panel.rows - 1}, grid, 1);
    cv::line(panel, {0, y}, {panel.cols - 1, y}, grid, 1);
  }
}

std::vector<std::string> WrapCaption(const std::string& text, int max_width) {
  std::vector<std::string> lines;
  std::istringstream words(text);
  std::string word, line;
  while (words >> word) {
    const std::string candidate = line.empty() ? word : line + " " + word;
    int baseline = 0;
    const cv::Size sz = cv::getTextSize(candidate, kFont, kFontScale, 1, &baseline);
    if (sz.width > max_width && !line.empty()) {
      lines.push_back(line);
      line = word;
    } else {
      line = candidate;
    }
  }
  if (!line.empty()) lines.push_back(line);
  return lines;
}

}  // namespace

cv::Vec3b MarkerColor(std::size_t k) {
  static const cv::Vec3b kMarkers[] = {
      {0, 0, 255},   {0, 255, 0},   {255, 0, 0},   {0, 255, 255},
      {255, 0, 255}, {255, 255, 0}, {0, 128, 255}, {255, 0, 128},
  };
  return kMarkers[k % (sizeof(kMarkers) / sizeof(kMarkers[0]))];
}

Overlay RenderOverlay(const DatasetManifest& manifest, const ManifestEntry& entry,
                      const ChangeMask& mask, const MultimodalRecord& record) {
  const cv::Size size(mask.width(), mask.height());
  cv::Mat pre = LoadPanel(entry.pre_image, size);
  cv::Mat post = LoadPanel(entry.post_image, size);

  cv::Mat mask_panel(size, CV_8UC3, cv::Scalar(0, 0, 0));
  for (int y = 0; y < mask.height(); ++y) {
    auto* row = mask_panel.ptr<cv::Vec3b>(y);
    for (int x = 0; x < mask.width(); ++x) {
      const std::uint16_t l = mask.label(x, y);
      if (l) row[x] = FillColor(l);
    }
  }
  for (cv::Mat* panel : {&pre, &post, &mask_panel}) DrawGrid(*panel);

  const int panels_width = 3 * size.width + 2 * kGap;
  const std::string caption =
      record.description.empty() ? std::string("(no text)") : record.description;
  const auto lines = WrapCaption(caption, panels_width - 2 * kGap);
  const int caption_height = kLineHeight * static_cast<int>(lines.size()) + kGap * 2;

  Overlay out;
  out.image = cv::Mat(size.height + caption_height, panels_width, CV_8UC3,
                      cv::Scalar(32, 32, 32));
  pre.copyTo(out.image(cv::Rect(0, 0, size.width, size.height)));
  post.copyTo(out.image(cv::Rect(size.width + kGap, 0, size.width, size.height)));
  out.mask_panel = cv::Rect(2 * (size.width + kGap), 0, size.width, size.height);
  mask_panel.copyTo(out.image(out.mask_panel));

  const int radius = std::max(3, std::min(size.width, size.height) / 64);
  for (std::size_t k = 0; k < record.quadruples.size(); ++k) {
    const auto& q = record.quadruples[k];
    const cv::Point c(out.mask_panel.x + static_cast<int>(std::lround(q.centroid_x)),
                      static_cast<int>(std::lround(q.centroid_y)));
    const cv::Vec3b color = MarkerColor(k);
    cv::circle(out.image, c, radius + 1, cv::Scalar(0, 0, 0), cv::FILLED);
    cv::circle(out.image, c, radius, cv::Scalar(color[0], color[1], color[2]), cv::FILLED);
    out.markers.push_back({q.class_index, c, color});
  }

  int y = size.height + kGap + kLineHeight - 6;
  for (const auto& line : lines) {
    cv::putText(out.image, line, {kGap, y}, kFont, kFontScale,
                cv::Scalar(240, 240, 240), 1, cv::LINE_AA);
    y += kLineHeight;
  }
  (void)manifest;
  return out;
}

std::filesystem::path WriteOverlay(const DatasetManifest& manifest,
                                   const ManifestEntry& entry,
                                   const std::filesystem::path& out_dir) {
  const ChangeMask mask = ReadMask(entry.mask, manifest.palette);
  const MultimodalRecord record = BuildRecord(manifest, entry, mask);
  const Overlay overlay = RenderOverlay(manifest, entry, mask, record);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const auto path = out_dir / (entry.image_id + ".png");
  if (!cv::imwrite(path.string(), overlay.image)) {
    throw Error(ErrorCode::kIo, "cannot write overlay " + path.string());
  }
  return path;
}

}  // namespace masktext
