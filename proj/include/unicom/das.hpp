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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "unicom/autodiff.hpp"
#include "unicom/dataset.hpp"
#include "unicom/experts.hpp"
#include "unicom/graph.hpp"
#include "unicom/matrix.hpp"
#include "unicom/tokenize.hpp"
#include "unicom/ugl.hpp"

namespace unicom {

enum class Task
{
  cs,
  dcd,
  ocd,
};

std::string task_name(Task task);
Task        parse_task(std::string const &name);

// Prompt bank, projector and (OCD only) decoder: the only parameters DAS trains.
struct Adapter
{
  static constexpr int kFormatVersion = 1;

  Task                      task = Task::cs;
  ad::Tensor                keys;    // [N_p, d_tar]
  ad::Tensor                basis;   // [N_p, d_tar]
  ad::Tensor                proj_w;  // [d_tar, d_src]
  ad::Tensor                proj_b;  // [d_src]
  std::optional<OcdDecoder> decoder;
  std::size_t               communities = 0;
  std::vector<double>       loss_history;
  std::string               target_name;

  static Adapter init(Task task, std::size_t target_width, std::size_t source_width,
                      std::size_t n_prompts, std::uint64_t seed);

  std::size_t target_width() const
  {
    return proj_w.dim(0);
  }
  std::size_t source_width() const
  {
    return proj_w.dim(1);
  }

  std::vector<NamedTensor> named() const;
  std::vector<ad::Tensor>  tensors() const;
  std::size_t              parameter_count() const;
  void                     set_requires_grad(bool flag);
};

// Prompt weights softmax(x keys^T), one row per token.
ad::Tensor prompt_weights(ad::Tape &tape, ad::Tensor const &x, ad::Tensor const &keys);

// x + mask * (softmax(x keys^T) basis); masked token rows stay untouched.
ad::Tensor adaptation_prompt(ad::Tape &tape, ad::Tensor const &x, ad::Mask const &mask,
                             ad::Tensor const &keys, ad::Tensor const &basis);

// Affine map per token row; masked rows come out zero.
ad::Tensor project(ad::Tape &tape, ad::Tensor const &x, ad::Mask const &mask, ad::Tensor const &w,
                   ad::Tensor const &b);

// Nodes whose best cosine to any anchor is lowest; ties by ascending id.
std::vector<NodeId> select_challenging_nodes(Matrix const &anchors, Matrix const &pooled,
                                             std::size_t count);

// Median pairwise distance over the union of both sets; 1 when the median is 0.
double median_bandwidth(Matrix const &a, Matrix const &b);

// Gaussian-kernel MMD^2 between target rows and source rows, k = exp(-d^2 / (2 sigma^2)).
ad::Tensor cmmd_loss(ad::Tape &tape, ad::Tensor const &target, ad::Tensor const &source,
                     double sigma);

// Binary cross-entropy on sigmoid(q . rep_v / sqrt(dim)) for the labelled nodes of
// every query, averaged per query and then over queries.
ad::Tensor cs_loss(ad::Tape &tape, ad::Tensor const &rep, std::span<Query const> queries);

// Refinement loss for given hard labels in [0, k).
ad::Tensor dcd_loss(ad::Tape &tape, ad::Tensor const &node, ad::Tensor const &com,
                    std::span<std::size_t const> labels, std::size_t k, double tau);
// Same, with labels from K-means on the detached node embeddings.
ad::Tensor dcd_loss(ad::Tape &tape, ad::Tensor const &node, ad::Tensor const &com, std::size_t k,
                    double tau, std::uint64_t seed);

// Bernoulli-Poisson negative log-likelihood over edges and sampled non-edges.
ad::Tensor ocd_loss(ad::Tape &tape, ad::Tensor const &y, PairSample const &edges,
                    PairSample const &non_edges, float eps);

struct DasConfig
{
  Task          task        = Task::cs;
  std::size_t   communities = 0;  // required for dcd and ocd
  float         alpha       = 0.1f;
  float         lr          = 5e-3f;
  std::size_t   epochs      = 100;
  std::size_t   patience    = 20;
  double        min_delta   = 1e-4;
  std::size_t   n_prompts   = 10;
  double        tau         = 0.5;
  float         ocd_eps     = 1e-5f;
  std::size_t   non_edge_factor = 5;
  std::size_t   decoder_hidden  = 64;
  float         margin      = 0.5f;
  float         beta        = 0.1f;
  std::size_t   negatives   = 5;
  std::uint64_t seed        = 0;

  void validate() const;
};

struct ExpertOutput
{
  Embeddings embeddings;
  Matrix     affiliation;  // OCD only: |V| x K, non-negative
};

struct DasResult
{
  Adapter             adapter;
  std::vector<double> loss;
  std::vector<double> task_loss;
  std::vector<double> cmmd;
  ExpertOutput        output;
};

// FNV-1a over the raw bytes of every encoder parameter.
std::uint64_t backbone_digest(EncoderParams const &params);

// Target tokens built with the checkpoint's preprocessing settings.
Preprocessed preprocess_target(Graph const &g, ExpertCheckpoint const &ckpt,
                               std::size_t known_communities = 0);

DasResult das_train(Graph const &g, TokenTensor const &tokens, ExpertCheckpoint const &ckpt,
                    std::span<Query const> queries, DasConfig const &config);

ExpertOutput run_expert(ExpertCheckpoint const &ckpt, Adapter const &adapter,
                        TokenTensor const &tokens);

std::filesystem::path adapter_dir(std::filesystem::path const &checkpoint_dir, Task task);
void    save_adapter(Adapter const &adapter, std::filesystem::path const &dir);
Adapter load_adapter(std::filesystem::path const &dir);

}  // namespace unicom
