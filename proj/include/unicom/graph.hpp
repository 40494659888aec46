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
#include <utility>
#include <vector>

#include "unicom/matrix.hpp"

namespace unicom {

using NodeId = std::size_t;

struct Edge
{
  NodeId u;
  NodeId v;

  bool operator==(Edge const &) const = default;
};

/// Immutable simple undirected graph in CSR form with a dense feature matrix.
///
/// Construction strips self-loops and merges duplicate or reversed edges, so
/// adjacency is always symmetric and neighbour lists are sorted and unique.
class Graph
{
public:
  Graph() = default;
  Graph(std::size_t n_nodes, std::span<Edge const> edges, Matrix features);

  std::size_t num_nodes() const noexcept
  {
    return offsets_.empty() ? 0 : offsets_.size() - 1;
  }
  // Undirected edge count.
  std::size_t num_edges() const noexcept
  {
    return targets_.size() / 2;
  }
  std::size_t degree(NodeId v) const
  {
    return offsets_[v + 1] - offsets_[v];
  }
  std::span<NodeId const> neighbors(NodeId v) const
  {
    return {targets_.data() + offsets_[v], degree(v)};
  }
  bool has_edge(NodeId u, NodeId v) const;

  Matrix const &features() const noexcept
  {
    return features_;
  }
  std::size_t feature_dim() const noexcept
  {
    return features_.cols;
  }

  // Each undirected edge once, u < v, in CSR order.
  std::vector<Edge> edge_list() const;

  // Same topology, different features (row count must match).
  Graph with_features(Matrix features) const;

  // Relabels node v as perm[v].
  Graph permuted(std::span<NodeId const> perm) const;

private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId>      targets_;
  Matrix                   features_;
};

}  // namespace unicom
