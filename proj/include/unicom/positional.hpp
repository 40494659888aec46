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

#include "unicom/graph.hpp"
#include "unicom/matrix.hpp"

namespace unicom {

enum class EigenMethod
{
  automatic,  // dense up to kDenseEigenLimit nodes, subspace iteration above
  dense,
  iterative,
};

inline constexpr std::size_t kDenseEigenLimit = 512;

/// Laplacian eigenvector positional encoding, |V| x k.
///
/// Columns are eigenvectors of L = I - D^{-1/2} A D^{-1/2} for the k smallest
/// eigenvalues once the trivial direction D^{1/2} 1 is removed, ordered by
/// eigenvalue. Each column is sign-fixed so that its largest-magnitude entry
/// (first on ties) is positive. An edgeless graph yields zeros.
Matrix laplacian_pe(Graph const &g, std::size_t k, EigenMethod method = EigenMethod::automatic);

}  // namespace unicom
