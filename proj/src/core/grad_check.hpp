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

#ifndef MASKTEXT_CORE_GRAD_CHECK_HPP_
#define MASKTEXT_CORE_GRAD_CHECK_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/tensor.hpp"

// Analytic gradients against central finite differences on random instances.
namespace masktext::numerics {

// Denominator floor for relative errors, so entries whose true gradient is
// zero are compared on an absolute scale.
inline constexpr double kRelErrorFloor = 1e-6;

// |a - n| / max(|a|, |n|, kRelErrorFloor).
double RelativeError(double analytic, double numeric);

// Central differences of a scalar function with respect to every entry of x.
DenseTensor NumericGradient(const std::function<double(const DenseTensor&)>& f,
                            const DenseTensor& x, double h);

// Max relative error over all entries. Throws NonFiniteGradient when either
// side contains a non-finite value, ShapeMismatch on differing sizes.
double MaxRelativeError(const DenseTensor& analytic, const DenseTensor& numeric);

// attention, fuse, focal, dice, lovasz, seg, contrastive, total.
const std::vector<std::string>& GradCheckOps();

struct GradCheckOptions {
  std::vector<std::string> ops;  // empty = all
  int trials = 20;
  double h = 1e-5;
  double tolerance = 1e-4;
  std::uint64_t seed = 0;
};

struct TensorCheck {
  std::string name;
  double max_rel_error = 0.0;
};

struct OpCheck {
  std::string op;
  int trials = 0;
  // Instances rejected because a Lovasz error sort was within 4h of a tie.
  int skipped = 0;
  double max_rel_error = 0.0;
  std::vector<TensorCheck> tensors;
  bool passed = false;
};

struct GradCheckReport {
  GradCheckOptions options;
  std::vector<OpCheck> ops;
  bool passed = false;

  nlohmann::ordered_json ToJson() const;
};

// Throws InvalidArgument on unknown op names or non-positive trials / h.
GradCheckReport RunGradCheck(const GradCheckOptions& options);

}  // namespace masktext::numerics

#endif  // MASKTEXT_CORE_GRAD_CHECK_HPP_
