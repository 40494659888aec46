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

#include "unicom/graph.hpp"

#include <algorithm>
#include <string>

#include "unicom/error.hpp"

namespace unicom {

Graph::Graph(std::size_t n_nodes, std::span<Edge const> edges, Matrix features)
  : features_(std::move(features))
{
  if (features_.rows != n_nodes)
  {
    throw InvalidArgument("Graph: feature matrix has " + std::to_string(features_.rows) +
                          " rows for " + std::to_string(n_nodes) + " nodes");
  }
  std::vector<std::pair<NodeId, NodeId>> arcs;
  arcs.reserve(edges.size() * 2);
  for (auto const &e : edges)
  {
    if (e.u >= n_nodes || e.v >= n_nodes)
    {
      throw InvalidArgument("Graph: edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                            ") out of range for " + std::to_string(n_nodes) + " nodes");
    }
    if (e.u == e.v)
    {
      continue;
    }
    arcs.emplace_back(e.u, e.v);
    arcs.emplace_back(e.v, e.u);
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

  offsets_.assign(n_nodes + 1, 0);
  targets_.resize(arcs.size());
  for (std::size_t i = 0; i < arcs.size(); ++i)
  {
    ++offsets_[arcs[i].first + 1];
    targets_[i] = arcs[i].second;
  }
  for (std::size_t v = 0; v < n_nodes; ++v)
  {
    offsets_[v + 1] += offsets_[v];
  }
}

bool Graph::has_edge(NodeId u, NodeId v) const
{
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edge_list() const
{
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u)
  {
    for (NodeId v : neighbors(u))
    {
      if (u < v)
      {
        out.push_back({u, v});
      }
    }
  }
  return out;
}

Graph Graph::with_features(Matrix features) const
{
  Graph g;
  if (features.rows != num_nodes())
  {
    throw InvalidArgument("Graph::with_features: row count mismatch");
  }
  g.offsets_  = offsets_;
  g.targets_  = targets_;
  g.features_ = std::move(features);
  return g;
}

Graph Graph::permuted(std::span<NodeId const> perm) const
{
  std::size_t const n = num_nodes();
  if (perm.size() != n)
  {
    throw InvalidArgument("Graph::permuted: permutation size mismatch");
  }
  auto edges = edge_list();
  for (auto &e : edges)
  {
    e = {perm[e.u], perm[e.v]};
  }
  Matrix feats(n, features_.cols);
  for (NodeId v = 0; v < n; ++v)
  {
    std::copy(features_.row(v).begin(), features_.row(v).end(), feats.row(perm[v]).begin());
  }
  return Graph(n, edges, std::move(feats));
}

}  // namespace unicom
