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

#include "unicom/tokenize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "unicom/error.hpp"

namespace unicom {

NormalizedAdjacency::NormalizedAdjacency(Graph const &g)
{
  std::size_t const n = g.num_nodes();
  offsets_.assign(n + 1, 0);
  targets_.reserve(2 * g.num_edges());
  weights_.reserve(2 * g.num_edges());
  std::vector<double> inv_sqrt(n, 0.0);
  for (NodeId v = 0; v < n; ++v)
  {
    std::size_t const d = g.degree(v);
    inv_sqrt[v]         = d == 0 ? 0.0 : 1.0 / std::sqrt(static_cast<double>(d));
  }
  for (NodeId v = 0; v < n; ++v)
  {
    for (NodeId u : g.neighbors(v))
    {
      targets_.push_back(u);
      weights_.push_back(inv_sqrt[v] * inv_sqrt[u]);
    }
    offsets_[v + 1] = targets_.size();
  }
}

Matrix NormalizedAdjacency::apply(Matrix const &x) const
{
  if (x.rows != size())
  {
    throw InvalidArgument("NormalizedAdjacency::apply: row count mismatch");
  }
  Matrix              out(x.rows, x.cols);
  std::vector<double> acc(x.cols);
  for (std::size_t v = 0; v < size(); ++v)
  {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t e = offsets_[v]; e < offsets_[v + 1]; ++e)
    {
      auto const   src = x.row(targets_[e]);
      double const w   = weights_[e];
      for (std::size_t j = 0; j < x.cols; ++j)
      {
        acc[j] += w * src[j];
      }
    }
    auto dst = out.row(v);
    for (std::size_t j = 0; j < x.cols; ++j)
    {
      dst[j] = static_cast<float>(acc[j]);
    }
  }
  return out;
}

Matrix NormalizedAdjacency::to_dense() const
{
  Matrix out(size(), size());
  for (std::size_t v = 0; v < size(); ++v)
  {
    for (std::size_t e = offsets_[v]; e < offsets_[v + 1]; ++e)
    {
      out(v, targets_[e]) = static_cast<float>(weights_[e]);
    }
  }
  return out;
}

PropagationStack propagate(Graph const &g, Matrix const &x, std::size_t h_max)
{
  if (x.rows != g.num_nodes())
  {
    throw InvalidArgument("propagate: feature rows do not match node count");
  }
  NormalizedAdjacency const adj(g);
  PropagationStack          stack;
  stack.hops.reserve(h_max + 1);
  stack.hops.push_back(x);
  for (std::size_t i = 1; i <= h_max; ++i)
  {
    stack.hops.push_back(adj.apply(stack.hops.back()));
  }
  return stack;
}

std::vector<NodeId> khop_neighborhood(Graph const &g, NodeId v, std::size_t hops)
{
  if (v >= g.num_nodes())
  {
    throw InvalidArgument("khop_neighborhood: node out of range");
  }
  std::vector<std::uint8_t> seen(g.num_nodes(), 0);
  std::vector<NodeId>       ball{v};
  seen[v]                 = 1;
  std::size_t layer_begin = 0;
  for (std::size_t depth = 0; depth < hops; ++depth)
  {
    std::size_t const layer_end = ball.size();
    for (std::size_t i = layer_begin; i < layer_end; ++i)
    {
      for (NodeId u : g.neighbors(ball[i]))
      {
        if (!seen[u])
        {
          seen[u] = 1;
          ball.push_back(u);
        }
      }
    }
    if (ball.size() == layer_end)
    {
      break;
    }
    layer_begin = layer_end;
  }
  std::sort(ball.begin(), ball.end());
  return ball;
}

ConductanceTerms conductance_terms(Graph const &g, std::span<NodeId const> members)
{
  std::vector<std::uint8_t> in(g.num_nodes(), 0);
  for (NodeId v : members)
  {
    if (v >= g.num_nodes())
    {
      throw InvalidArgument("conductance: node " + std::to_string(v) + " out of range");
    }
    in[v] = 1;
  }
  std::uint64_t cut   = 0;
  std::uint64_t deg_c = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v)
  {
    if (!in[v])
    {
      continue;
    }
    deg_c += g.degree(v);
    for (NodeId u : g.neighbors(v))
    {
      cut += in[u] ? 0 : 1;
    }
  }
  std::uint64_t const total = 2 * static_cast<std::uint64_t>(g.num_edges());
  return {cut, std::min(deg_c, total - deg_c)};
}

double conductance(Graph const &g, std::span<NodeId const> members)
{
  auto const t = conductance_terms(g, members);
  if (t.denom == 0)
  {
    return 1.0;
  }
  return static_cast<double>(t.cut) / static_cast<double>(t.denom);
}

namespace {

// Reusable BFS scratch space; stamps avoid clearing per source node.
class HopSelector
{
public:
  explicit HopSelector(Graph const &g)
    : g_(g)
    , stamp_(g.num_nodes(), 0)
    , total_(2 * static_cast<std::uint64_t>(g.num_edges()))
  {}

  std::size_t select(NodeId v, std::size_t h_max)
  {
    ++epoch_;
    ball_.clear();
    deg_ = 0;
    cut_ = 0;
    add(v);
    // Sentinel: a degenerate ball scores exactly 1.
    std::uint64_t best_cut   = 1;
    std::uint64_t best_denom = 1;
    std::size_t   best_hop   = 0;
    consider(0, best_cut, best_denom, best_hop);

    std::size_t layer_begin = 0;
    for (std::size_t hop = 1; hop <= h_max; ++hop)
    {
      std::size_t const layer_end = ball_.size();
      for (std::size_t i = layer_begin; i < layer_end; ++i)
      {
        for (NodeId u : g_.neighbors(ball_[i]))
        {
          if (stamp_[u] != epoch_)
          {
            add(u);
          }
        }
      }
      if (ball_.size() == layer_end)
      {
        // The ball stopped growing; later hops repeat the same value.
        break;
      }
      layer_begin = layer_end;
      consider(hop, best_cut, best_denom, best_hop);
    }
    return best_hop;
  }

private:
  void add(NodeId u)
  {
    stamp_[u] = epoch_;
    ball_.push_back(u);
    std::uint64_t inside = 0;
    for (NodeId w : g_.neighbors(u))
    {
      inside += (stamp_[w] == epoch_ && w != u) ? 1 : 0;
    }
    std::uint64_t const d = g_.degree(u);
    deg_ += d;
    cut_ = cut_ + d - 2 * inside;
  }

  void consider(std::size_t hop, std::uint64_t &best_cut, std::uint64_t &best_denom,
                std::size_t &best_hop) const
  {
    std::uint64_t const denom = std::min(deg_, total_ - deg_);
    std::uint64_t const cut   = denom == 0 ? 1 : cut_;
    std::uint64_t const den   = denom == 0 ? 1 : denom;
    // cut/den < best_cut/best_denom, exactly.
    if (static_cast<unsigned __int128>(cut) * best_denom <
        static_cast<unsigned __int128>(best_cut) * den)
    {
      best_cut   = cut;
      best_denom = den;
      best_hop   = hop;
    }
  }

  Graph const              &g_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t             epoch_ = 0;
  std::uint64_t             total_;
  std::vector<NodeId>       ball_;
  std::uint64_t             deg_ = 0;
  std::uint64_t             cut_ = 0;
};

}  // namespace

std::size_t select_local_hop(Graph const &g, NodeId v, std::size_t h_max)
{
  if (v >= g.num_nodes())
  {
    throw InvalidArgument("select_local_hop: node out of range");
  }
  HopSelector selector(g);
  return selector.select(v, h_max);
}

std::vector<std::size_t> select_local_hops(Graph const &g, std::size_t h_max)
{
  HopSelector              selector(g);
  std::vector<std::size_t> out(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v)
  {
    out[v] = selector.select(v, h_max);
  }
  return out;
}

ad::Tensor TokenTensor::as_tensor() const
{
  return ad::Tensor::from_data({nodes * tokens, width}, values);
}

Matrix TokenTensor::pooled() const
{
  Matrix              out(nodes, width);
  std::vector<double> acc(width);
  for (std::size_t v = 0; v < nodes; ++v)
  {
    std::fill(acc.begin(), acc.end(), 0.0);
    std::size_t count = 0;
    for (std::size_t t = 0; t < tokens; ++t)
    {
      if (!valid(v, t))
      {
        continue;
      }
      ++count;
      auto tok = token(v, t);
      for (std::size_t j = 0; j < width; ++j)
      {
        acc[j] += tok[j];
      }
    }
    if (count == 0)
    {
      continue;
    }
    for (std::size_t j = 0; j < width; ++j)
    {
      out(v, j) = static_cast<float>(acc[j] / static_cast<double>(count));
    }
  }
  return out;
}

TokenTensor build_aug_tokens(PropagationStack const &stack, std::span<std::size_t const> selected_hop)
{
  if (stack.hops.empty())
  {
    throw InvalidArgument("build_aug_tokens: empty propagation stack");
  }
  std::size_t const h_max = stack.h_max();
  TokenTensor       out;
  out.nodes  = stack.hops[0].rows;
  out.tokens = h_max + 3;
  out.width  = stack.hops[0].cols;
  if (selected_hop.size() != out.nodes)
  {
    throw InvalidArgument("build_aug_tokens: one selected hop per node required");
  }
  out.values.assign(out.nodes * out.tokens * out.width, 0.0f);
  out.mask.assign(out.nodes * out.tokens, 0);
  out.selected_hop.assign(selected_hop.begin(), selected_hop.end());
  for (std::size_t v = 0; v < out.nodes; ++v)
  {
    if (selected_hop[v] > h_max)
    {
      throw InvalidArgument("build_aug_tokens: selected hop exceeds h_max");
    }
    for (std::size_t t = 0; t <= selected_hop[v]; ++t)
    {
      auto src = stack.hops[t].row(v);
      std::copy(src.begin(), src.end(), out.token(v, t).begin());
      out.mask[v * out.tokens + t] = 1;
    }
  }
  return out;
}

}  // namespace unicom
