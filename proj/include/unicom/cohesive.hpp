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

// Global cohesive-subgraph prompts: a K-means partition of node features and
// a Louvain partition of the topology, each turned into a per-node mean
// feature token.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "unicom/graph.hpp"
#include "unicom/matrix.hpp"
#include "unicom/tokenize.hpp"

namespace unicom {

struct ClusterAssignment
{
  std::vector<std::size_t> labels;     // one per row / node, in [0, k)
  Matrix                   centroids;  // K-means only
  std::size_t              k = 0;
  // K-means: inertia after every update step. Louvain: modularity after every pass.
  std::vector<double> history;
};

struct KMeansOptions
{
  std::size_t   max_iters = 100;
  std::uint64_t seed      = 0;
  std::size_t   restarts  = 1;  // best-inertia run wins
};

/// k-means++ seeding followed by Lloyd iterations. Empty clusters are reseeded
/// at the point farthest from its own centroid.
ClusterAssignment kmeans(Matrix const &x, std::size_t k, KMeansOptions const &options = {});

double kmeans_inertia(Matrix const &x, ClusterAssignment const &a);

struct LouvainOptions
{
  // Visit order is ascending node id; the seed is kept for interface parity
  // and does not change the result.
  std::uint64_t seed = 0;
  // Recompute modularity from scratch around every move and count moves that
  // fail to strictly increase it. Quadratic; meant for tests.
  bool        verify_moves = false;
  double      min_gain     = 1e-12;
  std::size_t max_levels   = 64;
};

struct LouvainResult
{
  ClusterAssignment assignment;
  double            modularity       = 0.0;
  std::size_t       moves            = 0;
  std::size_t       violating_moves  = 0;
};

LouvainResult louvain(Graph const &g, LouvainOptions const &options = {});

struct PromptPair
{
  Matrix feat;
  Matrix strc;
};

/// Row v = mean of x over the members of v's cluster.
Matrix cluster_mean_prompt(Matrix const &x, ClusterAssignment const &a);

inline Matrix feature_prompt(Matrix const &x, ClusterAssignment const &a)
{
  return cluster_mean_prompt(x, a);
}
inline Matrix structure_prompt(Matrix const &x, ClusterAssignment const &a)
{
  return cluster_mean_prompt(x, a);
}

/// Writes the prompts into the last two token slots and marks them valid.
TokenTensor assemble_cohesive_tokens(TokenTensor aug, PromptPair const &prompts);

}  // namespace unicom
