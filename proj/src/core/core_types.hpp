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

#ifndef MASKTEXT_CORE_CORE_TYPES_HPP_
#define MASKTEXT_CORE_CORE_TYPES_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core/tensor.hpp"

namespace masktext {

// Nine-way location of a change region on a 3x3 partition of the image.
enum class Direction : std::uint8_t {
  kNorth,
  kSouth,
  kEast,
  kWest,
  kCenter,
  kNortheast,
  kNorthwest,
  kSoutheast,
  kSouthwest,
};

inline constexpr std::array<Direction, 9> kAllDirections = {
    Direction::kNorth,     Direction::kSouth,     Direction::kEast,
    Direction::kWest,      Direction::kCenter,    Direction::kNortheast,
    Direction::kNorthwest, Direction::kSoutheast, Direction::kSouthwest,
};

std::string_view DirectionName(Direction d);
std::optional<Direction> DirectionFromName(std::string_view name);

// Area-binned count descriptor.
enum class Quantity : std::uint8_t { kSingle, kFew, kSeveral, kMultiple };

inline constexpr std::array<Quantity, 4> kAllQuantities = {
    Quantity::kSingle, Quantity::kFew, Quantity::kSeveral, Quantity::kMultiple};

std::string_view QuantityName(Quantity q);
std::optional<Quantity> QuantityFromName(std::string_view name);

// Row-major W x H boolean raster. Immutable; the foreground count is computed
// once at construction.
class BinaryMask {
 public:
  BinaryMask(int width, int height);
  // `bits` holds one byte per pixel, non-zero meaning foreground.
  BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const { return width_; }
  int height() const { return height_; }
  bool at(int x, int y) const {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::uint64_t foreground_count() const { return foreground_count_; }

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
  std::uint64_t foreground_count_ = 0;
};

struct ClassEntry {
  std::uint16_t class_index = 0;
  std::string category;
  std::string change_type;

  bool operator==(const ClassEntry&) const = default;
};

// Labeled raster for one bi-temporal sample. Label 0 is no-change; every
// other label should resolve through the class table (see ValidateChangeMask).
class ChangeMask {
 public:
  ChangeMask(int width, int height, std::vector<std::uint16_t> labels,
             std::vector<ClassEntry> class_table);

  int width() const { return width_; }
  int height() const { return height_; }
  std::uint16_t label(int x, int y) const {
    return labels_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::span<const std::uint16_t> labels() const { return labels_; }
  const std::vector<ClassEntry>& class_table() const { return class_table_; }

  BinaryMask ExtractClass(std::uint16_t class_index) const;

  // One binary mask per class-table entry, in table order.
  std::vector<std::pair<ClassEntry, BinaryMask>> Decompose() const;
  static ChangeMask Recompose(
      const std::vector<std::pair<ClassEntry, BinaryMask>>& parts);

 private:
  int width_;
  int height_;
  std::vector<std::uint16_t> labels_;
  std::vector<ClassEntry> class_table_;
};

struct ValidationFinding {
  enum class Kind {
    kBadDimensions,
    kRasterSize,
    kReservedIndex,
    kDuplicateClass,
    kUnknownLabel,
  };
  Kind kind;
  int class_index = -1;
  int x = -1;  // first offending pixel, when applicable
  int y = -1;
  std::string message;
};

std::string_view FindingKindName(ValidationFinding::Kind kind);

// Empty result iff the mask is well formed. Unknown labels yield one finding
// per distinct value, located at its first occurrence in raster order.
std::vector<ValidationFinding> ValidateChangeMask(const ChangeMask& mask);

struct SemanticQuadruple {
  Direction location = Direction::kCenter;
  Quantity quantity = Quantity::kSingle;
  std::string category;
  std::string change_type;
  std::uint64_t pixel_count = 0;
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  std::uint16_t class_index = 0;

  bool operator==(const SemanticQuadruple&) const = default;
};

struct TextDescription {
  std::string sentence;
  int template_id = 1;
  SemanticQuadruple quadruple;
  std::uint64_t rng_seed = 0;
};

// B x d batch of embeddings. Rejects empty or non-finite input.
class EmbeddingBatch {
 public:
  explicit EmbeddingBatch(DenseTensor values);
  EmbeddingBatch(std::size_t rows, std::size_t cols,
                 std::vector<double> values);

  std::size_t rows() const { return values_.rows(); }
  std::size_t cols() const { return values_.cols(); }
  const DenseTensor& values() const { return values_; }

 private:
  DenseTensor values_;
};

struct LossWeights {
  double alpha = 0.4;    // focal
  double beta = 0.3;     // dice
  double gamma = 0.3;    // Lovasz
  double lambda = 0.5;   // contrastive
  double tau = 0.7;      // similarity temperature

  // Throws InvalidArgument / NonPositiveTau.
  void Validate() const;
};

// (n+1) x (n+1) confusion counts, row = ground truth, column = prediction,
// index 0 = no-change.
class ScdConfusion {
 public:
  explicit ScdConfusion(int n_classes);

  int n_classes() const { return n_classes_; }
  int dim() const { return n_classes_ + 1; }
  std::uint64_t at(int gt, int pred) const {
    return cells_[static_cast<std::size_t>(gt) * dim() + pred];
  }
  void Add(int gt, int pred, std::uint64_t count = 1) {
    cells_[static_cast<std::size_t>(gt) * dim() + pred] += count;
  }
  std::uint64_t total() const;
  std::span<const std::uint64_t> cells() const { return cells_; }

  // Cell-wise addition; throws ShapeMismatch on differing class counts.
  void Merge(const ScdConfusion& other);
  ScdConfusion Transposed() const;

  bool operator==(const ScdConfusion&) const = default;

 private:
  int n_classes_;
  std::vector<std::uint64_t> cells_;
};

}  // namespace masktext

#endif  // MASKTEXT_CORE_CORE_TYPES_HPP_
