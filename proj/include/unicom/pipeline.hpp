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

#include "unicom/cohesive.hpp"
#include "unicom/graph.hpp"
#include "unicom/matrix.hpp"
#include "unicom/tokenize.hpp"

namespace unicom {

struct PreprocessConfig
{
  std::size_t   h_max  = 5;
  std::size_t   pe_dim = 3;
  std::size_t   k_feat = 0;  // 0 -> known community count, else ceil(sqrt(|V|))
  std::uint64_t seed   = 0;
};

struct Preprocessed
{
  Matrix            augmented;  // [X | PE]
  TokenTensor       tokens;
  ClusterAssignment feat;
  ClusterAssignment strc;
};

// PE columns beyond |V| - 1 are zero.
Matrix positional_columns(Graph const &g, std::size_t pe_dim);

std::size_t feature_cluster_count(PreprocessConfig const &config, std::size_t n_nodes,
                                  std::size_t known_communities);

Preprocessed preprocess(Graph const &g, PreprocessConfig const &config,
                        std::size_t known_communities = 0);

}  // namespace unicom
