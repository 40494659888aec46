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

#include "unicom/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "unicom/error.hpp"

namespace unicom {

Matrix::Matrix(std::size_t r, std::size_t c, std::vector<float> values)
  : rows(r)
  , cols(c)
  , data(std::move(values))
{
  if (data.size() != r * c)
  {
    throw InvalidArgument("Matrix: " + std::to_string(data.size()) + " values for " +
                          std::to_string(r) + "x" + std::to_string(c));
  }
}

Matrix hconcat(Matrix const &left, Matrix const &right)
{
  if (left.rows != right.rows)
  {
    throw InvalidArgument("hconcat: row count mismatch");
  }
  Matrix out(left.rows, left.cols + right.cols);
  for (std::size_t i = 0; i < left.rows; ++i)
  {
    auto dst = out.row(i);
    std::copy(left.row(i).begin(), left.row(i).end(), dst.begin());
    std::copy(right.row(i).begin(), right.row(i).end(),
              dst.begin() + static_cast<std::ptrdiff_t>(left.cols));
  }
  return out;
}

double squared_distance(std::span<float const> a, std::span<float const> b)
{
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    double const d = static_cast<double>(a[i]) - b[i];
    acc += d * d;
  }
  return acc;
}

double dot(std::span<float const> a, std::span<float const> b)
{
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    acc += static_cast<double>(a[i]) * b[i];
  }
  return acc;
}

double cosine(std::span<float const> a, std::span<float const> b)
{
  double const na = std::sqrt(dot(a, a));
  double const nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0)
  {
    return 0.0;
  }
  return dot(a, b) / (na * nb);
}

}  // namespace unicom
