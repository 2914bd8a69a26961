// include/asrtk/matrix.h
// Copyright 2026 The asrtk authors
//
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

#ifndef ASRTK_MATRIX_H_
#define ASRTK_MATRIX_H_

#include <cassert>
#include <cstddef>
#include <vector>

namespace asrtk {

// Dense row-major double matrix. Deliberately minimal: the training code
// needs contiguous rows and predictable iteration order, nothing more.
struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(size_t r, size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double &at(size_t r, size_t c) { return data[r * cols + c]; }
  double at(size_t r, size_t c) const { return data[r * cols + c]; }
  double *row(size_t r) { return data.data() + r * cols; }
  const double *row(size_t r) const { return data.data() + r * cols; }
  size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }

  void set_zero() { std::fill(data.begin(), data.end(), 0.0); }
};

using Vector = std::vector<double>;

}  // namespace asrtk

#endif  // ASRTK_MATRIX_H_
