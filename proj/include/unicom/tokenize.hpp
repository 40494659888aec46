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

// Conductance-driven local-subgraph tokenisation.
//
// Every node gets a sequence of hop tokens [X, ÂX, ..., Â^ĥ X] where ĥ is the
// BFS radius whose ball has the lowest conductance, followed by two cohesive
// prompt slots that the prompt module fills in.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "unicom/autodiff.hpp"
#include "unicom/graph.hpp"
#include "unicom/matrix.hpp"

namespace unicom {

/// Â = D^{-1/2} A D^{-1/2} in CSR form. Isolated nodes have empty rows.
class NormalizedAdjacency
{
public:
  explicit NormalizedAdjacency(Graph const &g);

  std::size_t size() const noexcept
  {
    return offsets_.size() - 1;
  }
  Matrix apply(Matrix const &x) const;
  // Dense copy, for tests and small eigensolves.
  Matrix to_dense() const;

  std::span<std::size_t const> offsets() const noexcept
  {
    return offsets_;
  }
  std::span<NodeId const> targets() const noexcept
  {
    return targets_;
  }
  std::span<double const> weights() const noexcept
  {
    return weights_;
  }

private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId>      targets_;
  std::vector<double>      weights_;
};

struct PropagationStack
{
  std::vector<Matrix> hops;  // hops[i] = Â^i X

  std::size_t h_max() const noexcept
  {
    return hops.size() - 1;
  }
};

PropagationStack propagate(Graph const &g, Matrix const &x, std::size_t h_max);
inline PropagationStack propagate(Graph const &g, std::size_t h_max)
{
  return propagate(g, g.features(), h_max);
}

/// Sorted {u : dist(u, v) <= hops}.
std::vector<NodeId> khop_neighborhood(Graph const &g, NodeId v, std::size_t hops);

struct ConductanceTerms
{
  std::uint64_t cut   = 0;
  std::uint64_t denom = 0;  // min(deg(C), deg(V \ C))
};

ConductanceTerms conductance_terms(Graph const &g, std::span<NodeId const> members);

/// cut / min(deg(C), deg(V\C)); 1.0 when the denominator vanishes.
double conductance(Graph const &g, std::span<NodeId const> members);

/// First hop in 0..h_max whose ball attains the minimum conductance.
std::size_t select_local_hop(Graph const &g, NodeId v, std::size_t h_max);
std::vector<std::size_t> select_local_hops(Graph const &g, std::size_t h_max);

/// Per-node token sequences, stored [nodes * tokens, width].
struct TokenTensor
{
  std::size_t              nodes  = 0;
  std::size_t              tokens = 0;
  std::size_t              width  = 0;
  std::vector<float>       values;
  ad::Mask                 mask;
  std::vector<std::size_t> selected_hop;

  std::size_t h_max() const noexcept
  {
    return tokens - 3;
  }
  std::span<float> token(std::size_t v, std::size_t t)
  {
    return {values.data() + (v * tokens + t) * width, width};
  }
  std::span<float const> token(std::size_t v, std::size_t t) const
  {
    return {values.data() + (v * tokens + t) * width, width};
  }
  bool valid(std::size_t v, std::size_t t) const
  {
    return mask[v * tokens + t] != 0;
  }

  // Copy of the values as an [nodes * tokens, width] tensor.
  ad::Tensor as_tensor() const;
  // Masked mean over all valid tokens, one row per node.
  Matrix pooled() const;
};

/// Hop tokens 0..ĥ(v) filled from the stack; hops past ĥ(v) and the two
/// prompt slots are zero and invalid.
TokenTensor build_aug_tokens(PropagationStack const &stack, std::span<std::size_t const> selected_hop);

}  // namespace unicom
