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

#ifndef MASKTEXT_CORE_TENSOR_HPP_
#define MASKTEXT_CORE_TENSOR_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace masktext {

// Row-major double tensor. Most operations in this library are rank 2.
class DenseTensor {
 public:
  DenseTensor() = default;
  // Throws InvalidArgument when the value count does not match the shape or
  // any value is non-finite.
  DenseTensor(std::vector<std::size_t> shape, std::vector<double> values);

  static DenseTensor Zeros(std::vector<std::size_t> shape);
  static DenseTensor Matrix(std::size_t rows, std::size_t cols,
                            std::vector<double> values);
  static DenseTensor Identity(std::size_t n);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }

  // Rank-2 accessors.
  std::size_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
  std::size_t cols() const { return shape_.size() < 2 ? 1 : shape_[1]; }
  double& operator()(std::size_t r, std::size_t c) {
    return values_[r * shape_[1] + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * shape_[1] + c];
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool AllFinite() const;
  std::string ShapeString() const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> values_;
};

// Throws ShapeMismatch unless `t` is rank 2.
void RequireMatrix(const DenseTensor& t, const char* what);

DenseTensor MatMul(const DenseTensor& a, const DenseTensor& b);
// a * b^T
DenseTensor MatMulTransB(const DenseTensor& a, const DenseTensor& b);
// a^T * b
DenseTensor MatMulTransA(const DenseTensor& a, const DenseTensor& b);
DenseTensor Transpose(const DenseTensor& a);

}  // namespace masktext

#endif  // MASKTEXT_CORE_TENSOR_HPP_
