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

#include "core/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "core/errors.hpp"

namespace masktext {

namespace {

std::size_t ShapeProduct(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::size_t> shape,
                         std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (shape_.empty() || ShapeProduct(shape_) != values_.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "tensor of shape " + ShapeString() + " given " +
                    std::to_string(values_.size()) + " values");
  }
  if (!AllFinite()) {
    throw Error(ErrorCode::kInvalidArgument,
                "tensor of shape " + ShapeString() +
                    " contains non-finite values");
  }
}

DenseTensor DenseTensor::Zeros(std::vector<std::size_t> shape) {
  const std::size_t n = ShapeProduct(shape);
  return DenseTensor(std::move(shape), std::vector<double>(n, 0.0));
}

DenseTensor DenseTensor::Matrix(std::size_t rows, std::size_t cols,
                                std::vector<double> values) {
  return DenseTensor({rows, cols}, std::move(values));
}

DenseTensor DenseTensor::Identity(std::size_t n) {
  DenseTensor t = Zeros({n, n});
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

bool DenseTensor::AllFinite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string DenseTensor::ShapeString() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape_[i]);
  }
  return s + "]";
}

void RequireMatrix(const DenseTensor& t, const char* what) {
  if (t.rank() != 2) {
    throw Error(ErrorCode::kShapeMismatch, std::string(what) +
                                               " must be a matrix, got shape " +
                                               t.ShapeString());
  }
}

DenseTensor MatMul(const DenseTensor& a, const DenseTensor& b) {
  RequireMatrix(a, "lhs");
  RequireMatrix(b, "rhs");
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::kShapeMismatch,
                "matmul " + a.ShapeString() + " * " + b.ShapeString());
  }
  DenseTensor out = DenseTensor::Zeros({a.rows(), b.cols()});
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

DenseTensor MatMulTransB(const DenseTensor& a, const DenseTensor& b) {
  RequireMatrix(a, "lhs");
  RequireMatrix(b, "rhs");
  if (a.cols() != b.cols()) {
    throw Error(ErrorCode::kShapeMismatch,
                "matmul " + a.ShapeString() + " * " + b.ShapeString() + "^T");
  }
  DenseTensor out = DenseTensor::Zeros({a.rows(), b.rows()});
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(j, k);
      out(i, j) = acc;
    }
  }
  return out;
}

DenseTensor MatMulTransA(const DenseTensor& a, const DenseTensor& b) {
  RequireMatrix(a, "lhs");
  RequireMatrix(b, "rhs");
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::kShapeMismatch,
                "matmul " + a.ShapeString() + "^T * " + b.ShapeString());
  }
  DenseTensor out = DenseTensor::Zeros({a.cols(), b.cols()});
  for (std::size_t k = 0; k < a.rows(); ++k) {
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = a(k, i);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aki * b(k, j);
    }
  }
  return out;
}

DenseTensor Transpose(const DenseTensor& a) {
  RequireMatrix(a, "operand");
  DenseTensor out = DenseTensor::Zeros({a.cols(), a.rows()});
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

}  // namespace masktext
