#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The unicom Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include <cstddef>
#include <span>
#include <vector>

namespace unicom {

/// Dense row-major float matrix.
struct Matrix
{
  std::size_t        rows = 0;
  std::size_t        cols = 0;
  std::vector<float> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, float fill = 0.0f)
    : rows(r)
    , cols(c)
    , data(r * c, fill)
  {}
  Matrix(std::size_t r, std::size_t c, std::vector<float> values);

  float &operator()(std::size_t i, std::size_t j)
  {
    return data[i * cols + j];
  }
  float operator()(std::size_t i, std::size_t j) const
  {
    return data[i * cols + j];
  }

  std::span<float> row(std::size_t i)
  {
    return {data.data() + i * cols, cols};
  }
  std::span<float const> row(std::size_t i) const
  {
    return {data.data() + i * cols, cols};
  }

  bool operator==(Matrix const &) const = default;
};

// Column-wise concatenation; row counts must agree.
Matrix hconcat(Matrix const &left, Matrix const &right);

double squared_distance(std::span<float const> a, std::span<float const> b);
double dot(std::span<float const> a, std::span<float const> b);
// Zero vectors have similarity 0 with everything.
double cosine(std::span<float const> a, std::span<float const> b);

}  // namespace unicom
