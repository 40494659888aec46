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
#include <string>
#include <vector>

#include "unicom/autodiff.hpp"
#include "unicom/encoder.hpp"
#include "unicom/graph.hpp"
#include "unicom/matrix.hpp"
#include "unicom/metrics.hpp"

namespace unicom {

// concat(node_emb, com_emb), one row per node.
Matrix node_representation(Matrix const &node, Matrix const &com);

// Mean representation of the query nodes.
std::vector<double> query_embedding(std::span<NodeId const> query, Matrix const &rep);

// Softmax over all nodes of (q . rep_v) / sqrt(dim).
std::vector<double> cs_scores(std::span<NodeId const> query, Matrix const &rep);

// Query nodes first (in the given order), then the highest scores, ties by id.
std::vector<NodeId> rank_top_r(std::span<double const> scores, std::span<NodeId const> query,
                               std::size_t r);

struct CsResult
{
  std::vector<NodeId> community;
  std::vector<double> scores;
};

CsResult cs_expert(std::span<NodeId const> query, Matrix const &rep, std::size_t r);

std::vector<std::size_t> dcd_expert(Matrix const &rep, std::size_t k, std::uint64_t seed);

struct OcdDecoder
{
  ad::Tensor w1, b1, w2, b2;

  static OcdDecoder init(std::size_t input, std::size_t hidden, std::size_t k, std::uint64_t seed);
  std::vector<NamedTensor> named() const;
  std::vector<ad::Tensor>  tensors() const;
  std::size_t              communities() const
  {
    return w2.dim(1);
  }
};

// softplus(relu(rep W1 + b1) W2 + b2), so every entry is non-negative.
ad::Tensor ocd_expert(ad::Tape &tape, ad::Tensor const &rep, OcdDecoder const &decoder);

LabelSet threshold_memberships(Matrix const &y, double threshold);

}  // namespace unicom
