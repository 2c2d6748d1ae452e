// include/avsr/base/tensor.h

// Copyright 2026  The avsrbench Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef AVSR_BASE_TENSOR_H_
#define AVSR_BASE_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace avsr {

// Dense row-major array of doubles with a small shape vector. The last
// dimension is the "column" dimension; everything before it is flattened into
// rows when the tensor is viewed as a matrix.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape, double fill = 0.0);
  Tensor(std::vector<int> shape, std::vector<double> data);

  static Tensor Matrix(int rows, int cols, double fill = 0.0) {
    return Tensor({rows, cols}, fill);
  }
  static Tensor Scalar(double v) { return Tensor({1}, std::vector<double>{v}); }

  const std::vector<int>& Shape() const { return shape_; }
  int Rank() const { return static_cast<int>(shape_.size()); }
  int Dim(int i) const { return shape_[i < 0 ? shape_.size() + i : i]; }
  std::size_t Size() const { return data_.size(); }
  bool Empty() const { return data_.empty(); }

  int Rows() const;
  int Cols() const { return shape_.empty() ? 0 : shape_.back(); }

  double* Data() { return data_.data(); }
  const double* Data() const { return data_.data(); }
  std::span<double> Span() { return data_; }
  std::span<const double> Span() const { return data_; }
  std::vector<double>& Vec() { return data_; }
  const std::vector<double>& Vec() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& At(int r, int c) { return data_[static_cast<std::size_t>(r) * Cols() + c]; }
  double At(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * Cols() + c];
  }
  double* Row(int r) { return data_.data() + static_cast<std::size_t>(r) * Cols(); }
  const double* Row(int r) const {
    return data_.data() + static_cast<std::size_t>(r) * Cols();
  }

  // Same data, new shape; sizes must agree.
  Tensor Reshaped(std::vector<int> shape) const;
  void Fill(double v);
  void SetZero() { Fill(0.0); }
  bool SameShape(const Tensor& other) const { return shape_ == other.shape_; }

  std::string ShapeString() const;

 private:
  std::vector<int> shape_;
  std::vector<double> data_;
};

std::size_t ShapeSize(const std::vector<int>& shape);

}  // namespace avsr

#endif  // AVSR_BASE_TENSOR_H_
