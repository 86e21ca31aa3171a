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

#ifndef MASKTEXT_CORE_SCD_METRICS_HPP_
#define MASKTEXT_CORE_SCD_METRICS_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/core_types.hpp"

// Binary and semantic change-detection scores computed from confusion counts.
// docs/metrics.md pins the algebra, including every 0/0 convention.
namespace masktext {

// conf[gt][pred] += 1 per pixel. Throws ShapeMismatch on differing sizes and
// ClassOutOfRange for labels above conf.n_classes().
void Accumulate(std::span<const std::uint16_t> pred, std::span<const std::uint16_t> gt,
                ScdConfusion& conf);
void Accumulate(const ChangeMask& pred, const ChangeMask& gt, ScdConfusion& conf);

// Change as the positive class. A multi-class confusion is collapsed to
// change / no-change first.
struct BinaryMetrics {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double iou = 0.0;
  double oa = 0.0;
};

// Throws EmptyConfusion when the confusion holds no pixels.
BinaryMetrics ComputeBinaryMetrics(const ScdConfusion& conf);

// How Pre / Rec / mF1 aggregate over semantic classes.
enum class PrfAveraging {
  kMacro,  // mean over classes present in ground truth or prediction
  kMicro,  // pooled over all changed pixels
};

struct ClassScore {
  int class_index = 0;
  bool present = false;  // in ground truth or prediction
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ScdMetrics {
  double sek = 0.0;
  double f_scd = 0.0;
  double miou = 0.0;
  double iou_no_change = 0.0;
  double iou_change = 0.0;
  double kappa_no_change_suppressed = 0.0;
  double oa = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double mf1 = 0.0;
  std::vector<ClassScore> classes;  // semantic classes 1..n
};

// Throws EmptyConfusion when the confusion holds no pixels.
ScdMetrics ComputeScdMetrics(const ScdConfusion& conf,
                             PrfAveraging averaging = PrfAveraging::kMacro);

// Cohen's kappa of a square count matrix; 0 when the matrix is empty or the
// chance agreement is 1.
double Kappa(std::span<const std::uint64_t> cells, int dim);

enum class EvalMode { kScd, kBcd };

struct EvalOptions {
  EvalMode mode = EvalMode::kScd;
  int n_classes = 1;  // ignored in bcd mode
  PrfAveraging averaging = PrfAveraging::kMacro;
  int jobs = 1;
};

struct EvalResult {
  ScdConfusion confusion{1};
  std::size_t images = 0;
};

// Pairs every PNG in gt_dir with the same file name in pred_dir and
// accumulates one confusion. In bcd mode any non-zero value is change.
// Throws InvalidArgument (no ground-truth PNGs), MissingFile, DecodeError,
// ShapeMismatch, ClassOutOfRange.
EvalResult EvaluateDirectories(const std::filesystem::path& pred_dir,
                               const std::filesystem::path& gt_dir,
                               const EvalOptions& options);

nlohmann::ordered_json BinaryMetricsToJson(const BinaryMetrics& m);
nlohmann::ordered_json ScdMetricsToJson(const ScdMetrics& m);

}  // namespace masktext

#endif  // MASKTEXT_CORE_SCD_METRICS_HPP_
