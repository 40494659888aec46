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
#include <cstdint>
#include <span>
#include <vector>

#include "unicom/experts.hpp"
#include "unicom/matrix.hpp"
#include "unicom/metrics.hpp"

namespace unicom {

// Minimum-cost perfect matching on a square matrix; result[row] = column.
std::vector<std::size_t> hungarian(Matrix const &costs);

CsResult fuse_cs(std::span<std::vector<double> const> scores, std::span<NodeId const> query,
                 std::size_t r);

std::vector<std::size_t> fuse_dcd(std::span<Matrix const> reps, std::size_t k, std::uint64_t seed);

// Column map that aligns y onto reference; y column map[j] lands on reference column j.
std::vector<std::size_t> align_columns(Matrix const &reference, Matrix const &y);

struct OcdFusion
{
  Matrix   mean;
  LabelSet memberships;
};

OcdFusion fuse_ocd(std::span<Matrix const> ys, double threshold = 0.5);

}  // namespace unicom
