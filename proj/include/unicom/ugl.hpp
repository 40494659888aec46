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
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "unicom/autodiff.hpp"
#include "unicom/encoder.hpp"
#include "unicom/graph.hpp"
#include "unicom/matrix.hpp"
#include "unicom/pipeline.hpp"

namespace unicom {

// Ordered node pairs (u[i], v[i]).
struct PairSample
{
  std::vector<NodeId> u;
  std::vector<NodeId> v;

  std::size_t size() const noexcept
  {
    return u.size();
  }
};

// For every node v, `per_node` uniform u != v; v is the anchor, u the negative.
PairSample sample_negatives(std::size_t n_nodes, std::size_t per_node, std::mt19937_64 &rng);
// Every ordered pair u != v.
PairSample all_negatives(std::size_t n_nodes);
// Each undirected edge once.
PairSample edge_pairs(Graph const &g);
// Uniform pairs u != v absent from E, rejection sampled.
PairSample sample_non_edges(Graph const &g, std::size_t count, std::mt19937_64 &rng);
// Every ordered pair u != v absent from E.
PairSample all_non_edges(Graph const &g);  // unordered, u < v

// mean over pairs of -max(s(h_v . c_v) - s(h_u . c_v) + margin, 0), s = sigmoid.
ad::Tensor margin_loss(ad::Tape &tape, ad::Tensor const &node, ad::Tensor const &com,
                       PairSample const &negatives, float margin);

// mean over all sampled pairs of (1 - A_uv) h_u . h_v - A_uv h_u . h_v.
// Pair scores are dot products of l2-normalised node rows.
ad::Tensor recon_loss(ad::Tape &tape, ad::Tensor const &node, PairSample const &edges,
                      PairSample const &non_edges);

struct UglConfig
{
  EncoderConfig    encoder;  // input_dim is taken from the data
  PreprocessConfig preprocess;
  std::size_t      epochs     = 100;
  std::size_t      patience   = 10;
  double           min_delta  = 1e-4;
  float            lr         = 1e-3f;
  float            margin     = 0.5f;
  float            beta       = 0.1f;
  std::size_t      negatives  = 5;
  std::size_t      anchors    = 10;
  bool             full_pairs = false;  // exact quadratic sums; small graphs only
  std::uint64_t    seed       = 0;

  void validate() const;
};

struct ExpertCheckpoint
{
  static constexpr int kFormatVersion = 1;

  EncoderParams       params;
  PreprocessConfig    preprocess;
  std::size_t         source_dim = 0;  // raw feature width of the source graph
  Matrix              anchors;         // K_a x input_dim
  std::vector<double> loss_history;
  std::string         source_name;
};

struct Embeddings
{
  Matrix node;
  Matrix com;
};

// Evaluation-mode forward over every node.
Embeddings embed(EncoderParams const &params, TokenTensor const &tokens);

// K-means centroids of the pooled token features.
Matrix anchor_features(TokenTensor const &tokens, std::size_t count, std::uint64_t seed);

ExpertCheckpoint pretrain(Graph const &g, Preprocessed const &data, UglConfig const &config);
ExpertCheckpoint pretrain(Graph const &g, UglConfig const &config, std::size_t known_communities = 0);

void             save_checkpoint(ExpertCheckpoint const &ckpt, std::filesystem::path const &dir);
ExpertCheckpoint load_checkpoint(std::filesystem::path const &dir);

}  // namespace unicom
