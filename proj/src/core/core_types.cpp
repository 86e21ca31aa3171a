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

#include "core/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "core/errors.hpp"

namespace masktext {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kPaletteGap: return "PaletteGap";
    case ErrorCode::kDecode: return "DecodeError";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kClassOutOfRange: return "ClassOutOfRange";
    case ErrorCode::kParseFailure: return "ParseFailure";
    case ErrorCode::kNonPositiveTau: return "NonPositiveTau";
    case ErrorCode::kNonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::kEmptyConfusion: return "EmptyConfusion";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kDegenerate: return "Degenerate";
    case ErrorCode::kInternal: return "InternalError";
  }
  return "Unknown";
}

namespace {

constexpr std::array<std::string_view, 9> kDirectionNames = {
    "north",     "south",     "east",      "west",      "center",
    "northeast", "northwest", "southeast", "southwest",
};

constexpr std::array<std::string_view, 4> kQuantityNames = {
    "a single", "a few", "several", "multiple"};

void CheckDimensions(int width, int height, std::size_t count) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "raster dimensions must be positive, got " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
  if (count != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::kInvalidArgument,
                "raster of " + std::to_string(width) + "x" +
                    std::to_string(height) + " given " +
                    std::to_string(count) + " pixels");
  }
}

}  // namespace

std::string_view DirectionName(Direction d) {
  return kDirectionNames[static_cast<std::size_t>(d)];
}

std::optional<Direction> DirectionFromName(std::string_view name) {
  for (std::size_t i = 0; i < kDirectionNames.size(); ++i) {
    if (kDirectionNames[i] == name) return static_cast<Direction>(i);
  }
  return std::nullopt;
}

std::string_view QuantityName(Quantity q) {
  return kQuantityNames[static_cast<std::size_t>(q)];
}

std::optional<Quantity> QuantityFromName(std::string_view name) {
  for (std::size_t i = 0; i < kQuantityNames.size(); ++i) {
    if (kQuantityNames[i] == name) return static_cast<Quantity>(i);
  }
  return std::nullopt;
}

BinaryMask::BinaryMask(int width, int height)
    : BinaryMask(width, height,
                 std::vector<std::uint8_t>(
                     static_cast<std::size_t>(std::max(width, 0)) *
                         static_cast<std::size_t>(std::max(height, 0)),
                     0)) {}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  CheckDimensions(width_, height_, bits_.size());
  for (auto& b : bits_) {
    b = b ? 1 : 0;
    foreground_count_ += b;
  }
}

ChangeMask::ChangeMask(int width, int height, std::vector<std::uint16_t> labels,
                       std::vector<ClassEntry> class_table)
    : width_(width),
      height_(height),
      labels_(std::move(labels)),
      class_table_(std::move(class_table)) {
  CheckDimensions(width_, height_, labels_.size());
}

BinaryMask ChangeMask::ExtractClass(std::uint16_t class_index) const {
  std::vector<std::uint8_t> bits(labels_.size());
  std::transform(labels_.begin(), labels_.end(), bits.begin(),
                 [class_index](std::uint16_t l) {
                   return static_cast<std::uint8_t>(l == class_index);
                 });
  return BinaryMask(width_, height_, std::move(bits));
}

std::vector<std::pair<ClassEntry, BinaryMask>> ChangeMask::Decompose() const {
  std::vector<std::pair<ClassEntry, BinaryMask>> parts;
  parts.reserve(class_table_.size());
  for (const auto& entry : class_table_) {
    parts.emplace_back(entry, ExtractClass(entry.class_index));
  }
  return parts;
}

ChangeMask ChangeMask::Recompose(
    const std::vector<std::pair<ClassEntry, BinaryMask>>& parts) {
  if (parts.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot recompose a mask from zero parts");
  }
  const int w = parts.front().second.width();
  const int h = parts.front().second.height();
  std::vector<std::uint16_t> labels(static_cast<std::size_t>(w) * h, 0);
  std::vector<ClassEntry> table;
  for (const auto& [entry, mask] : parts) {
    if (mask.width() != w || mask.height() != h) {
      throw Error(ErrorCode::kShapeMismatch,
                  "recompose parts differ in size");
    }
    const auto bits = mask.bits();
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (!bits[i]) continue;
      if (labels[i] != 0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "recompose parts overlap at pixel " + std::to_string(i));
      }
      labels[i] = entry.class_index;
    }
    table.push_back(entry);
  }
  return ChangeMask(w, h, std::move(labels), std::move(table));
}

std::string_view FindingKindName(ValidationFinding::Kind kind) {
  switch (kind) {
    case ValidationFinding::Kind::kBadDimensions: return "bad dimensions";
    case ValidationFinding::Kind::kRasterSize: return "raster size";
    case ValidationFinding::Kind::kReservedIndex: return "reserved index";
    case ValidationFinding::Kind::kDuplicateClass: return "duplicate class";
    case ValidationFinding::Kind::kUnknownLabel: return "unknown label";
  }
  return "unknown";
}

std::vector<ValidationFinding> ValidateChangeMask(const ChangeMask& mask) {
  using Kind = ValidationFinding::Kind;
  std::vector<ValidationFinding> findings;

  std::set<int> known;
  for (const auto& entry : mask.class_table()) {
    if (entry.class_index == 0) {
      findings.push_back({Kind::kReservedIndex, 0, -1, -1,
                          "class index 0 is reserved for no-change"});
      continue;
    }
    if (!known.insert(entry.class_index).second) {
      findings.push_back({Kind::kDuplicateClass, entry.class_index, -1, -1,
                          "class index " + std::to_string(entry.class_index) +
                              " listed more than once"});
    }
  }

  std::map<int, std::size_t> unknown_first;
  const auto labels = mask.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int l = labels[i];
    if (l == 0 || known.count(l)) continue;
    unknown_first.emplace(l, i);
  }
  for (const auto& [label, offset] : unknown_first) {
    const int x = static_cast<int>(offset % mask.width());
    const int y = static_cast<int>(offset / mask.width());
    findings.push_back({Kind::kUnknownLabel, label, x, y,
                        "label " + std::to_string(label) +
                            " not in class table (first at x=" +
                            std::to_string(x) + ", y=" + std::to_string(y) +
                            ")"});
  }
  return findings;
}

EmbeddingBatch::EmbeddingBatch(DenseTensor values) : values_(std::move(values)) {
  RequireMatrix(values_, "embedding batch");
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "embedding batch must be non-empty");
  }
  if (!values_.AllFinite()) {
    throw Error(ErrorCode::kInvalidArgument,
                "embedding batch contains non-finite values");
  }
}

EmbeddingBatch::EmbeddingBatch(std::size_t rows, std::size_t cols,
                               std::vector<double> values)
    : EmbeddingBatch(DenseTensor::Matrix(rows, cols, std::move(values))) {}

void LossWeights::Validate() const {
  for (double w : {alpha, beta, gamma, lambda}) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "loss weights must be finite and non-negative");
    }
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorCode::kNonPositiveTau,
                "temperature must be positive, got " + std::to_string(tau));
  }
}

ScdConfusion::ScdConfusion(int n_classes) : n_classes_(n_classes) {
  if (n_classes < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "confusion needs at least one semantic class");
  }
  cells_.assign(static_cast<std::size_t>(dim()) * dim(), 0);
}

std::uint64_t ScdConfusion::total() const {
  std::uint64_t t = 0;
  for (auto c : cells_) t += c;
  return t;
}

void ScdConfusion::Merge(const ScdConfusion& other) {
  if (other.n_classes_ != n_classes_) {
    throw Error(ErrorCode::kShapeMismatch,
                "cannot merge confusions over " + std::to_string(n_classes_) +
                    " and " + std::to_string(other.n_classes_) + " classes");
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += other.cells_[i];
}

ScdConfusion ScdConfusion::Transposed() const {
  ScdConfusion t(n_classes_);
  for (int g = 0; g < dim(); ++g) {
    for (int p = 0; p < dim(); ++p) t.Add(p, g, at(g, p));
  }
  return t;
}

}  // namespace masktext
