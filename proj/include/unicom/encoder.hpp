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

// Graph transformer over per-node token sequences: an input projection,
// L pre-norm blocks (MHA and a GELU FFN, both residual). Token 0 reads out
// the node embedding; the masked mean of the other tokens reads out the
// community embedding.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "unicom/autodiff.hpp"

namespace unicom {

struct EncoderConfig
{
  std::size_t input_dim = 0;
  std::size_t hidden    = 512;
  std::size_t heads     = 8;
  std::size_t layers    = 1;
  std::size_t ffn_dim   = 0;  // 0 -> 2 * hidden
  float       dropout   = 0.1f;

  std::size_t ffn_width() const noexcept
  {
    return ffn_dim == 0 ? 2 * hidden : ffn_dim;
  }
  void validate() const;
};

// [fan_in, fan_out] weight, uniform in +-sqrt(6 / (fan_in + fan_out)).
ad::Tensor xavier_uniform(std::size_t fan_in, std::size_t fan_out, std::mt19937_64 &rng);

struct LayerParams
{
  ad::Tensor ln1_gamma, ln1_beta;
  ad::Tensor wq, bq, wk, bk, wv, bv, wo, bo;
  ad::Tensor ln2_gamma, ln2_beta;
  ad::Tensor w1, b1, w2, b2;
};

struct NamedTensor
{
  std::string name;
  ad::Tensor  tensor;
};

struct EncoderParams
{
  EncoderConfig            config;
  ad::Tensor               in_w, in_b;
  std::vector<LayerParams> layers;

  // Xavier-uniform weights, zero biases, unit layer-norm gains.
  static EncoderParams init(EncoderConfig const &config, std::uint64_t seed);

  // Stable order; names are the checkpoint file stems.
  std::vector<NamedTensor> named() const;
  std::vector<ad::Tensor>  tensors() const;
  std::size_t              parameter_count() const;
  void                     set_requires_grad(bool flag);
  EncoderParams            clone() const;
};

struct EmbeddingPair
{
  ad::Tensor node;  // [N, hidden]
  ad::Tensor com;   // [N, hidden]
};

/// x: [N*tokens, hidden]. Keys at masked positions get zero weight.
ad::Tensor mha(ad::Tape &tape, ad::Tensor const &x, ad::Mask const &mask, LayerParams const &p,
               std::size_t tokens, std::size_t heads);

ad::Tensor encoder_layer(ad::Tape &tape, ad::Tensor const &x, ad::Mask const &mask,
                         LayerParams const &p, EncoderConfig const &config, std::size_t tokens,
                         std::mt19937_64 &rng);

/// Runs the L blocks and the readout on already projected tokens.
EmbeddingPair gt_forward(ad::Tape &tape, ad::Tensor const &hidden_tokens, ad::Mask const &mask,
                         EncoderParams const &params, std::size_t tokens, std::mt19937_64 &rng);

/// Input projection followed by gt_forward. tokens_in: [N*tokens, input_dim].
EmbeddingPair encode(ad::Tape &tape, ad::Tensor const &tokens_in, ad::Mask const &mask,
                     EncoderParams const &params, std::size_t tokens, std::mt19937_64 &rng);

}  // namespace unicom
