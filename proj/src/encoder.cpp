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

#include "unicom/encoder.hpp"

#include <cmath>

#include "unicom/error.hpp"

namespace unicom {

void EncoderConfig::validate() const
{
  if (input_dim == 0 || hidden == 0 || heads == 0)
  {
    throw InvalidArgument("EncoderConfig: input_dim, hidden and heads must be positive");
  }
  if (hidden % heads != 0)
  {
    throw InvalidArgument("EncoderConfig: hidden " + std::to_string(hidden) +
                          " not divisible by heads " + std::to_string(heads));
  }
  if (!(dropout >= 0.0f && dropout < 1.0f))
  {
    throw InvalidArgument("EncoderConfig: dropout must lie in [0, 1)");
  }
}

ad::Tensor xavier_uniform(std::size_t fan_in, std::size_t fan_out, std::mt19937_64 &rng)
{
  double const                           bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<float>                     w(fan_in * fan_out);
  for (auto &x : w)
  {
    x = static_cast<float>(dist(rng));
  }
  return ad::Tensor::from_data({fan_in, fan_out}, std::move(w));
}

namespace {

ad::Tensor zeros(std::size_t n)
{
  return ad::Tensor::zeros({n});
}

ad::Tensor ones(std::size_t n)
{
  return ad::Tensor::full({n}, 1.0f);
}

ad::Tensor linear(ad::Tape &tape, ad::Tensor const &x, ad::Tensor const &w, ad::Tensor const &b)
{
  return ad::add_rowvec(tape, ad::matmul(tape, x, w), b);
}

}  // namespace

EncoderParams EncoderParams::init(EncoderConfig const &config, std::uint64_t seed)
{
  config.validate();
  std::mt19937_64 rng(seed);
  EncoderParams   p;
  std::size_t const h = config.hidden;
  p.config            = config;
  p.in_w              = xavier_uniform(config.input_dim, h, rng);
  p.in_b              = zeros(h);
  for (std::size_t l = 0; l < config.layers; ++l)
  {
    LayerParams lp;
    lp.ln1_gamma = ones(h);
    lp.ln1_beta  = zeros(h);
    lp.wq        = xavier_uniform(h, h, rng);
    lp.bq        = zeros(h);
    lp.wk        = xavier_uniform(h, h, rng);
    lp.bk        = zeros(h);
    lp.wv        = xavier_uniform(h, h, rng);
    lp.bv        = zeros(h);
    lp.wo        = xavier_uniform(h, h, rng);
    lp.bo        = zeros(h);
    lp.ln2_gamma = ones(h);
    lp.ln2_beta  = zeros(h);
    lp.w1        = xavier_uniform(h, config.ffn_width(), rng);
    lp.b1        = zeros(config.ffn_width());
    lp.w2        = xavier_uniform(config.ffn_width(), h, rng);
    lp.b2        = zeros(h);
    p.layers.push_back(std::move(lp));
  }
  return p;
}

std::vector<NamedTensor> EncoderParams::named() const
{
  std::vector<NamedTensor> out{{"input.weight", in_w}, {"input.bias", in_b}};
  for (std::size_t l = 0; l < layers.size(); ++l)
  {
    auto const  &lp  = layers[l];
    std::string const pre = "layer" + std::to_string(l) + ".";
    for (auto const &[name, t] : std::initializer_list<std::pair<char const *, ad::Tensor const *>>{
             {"ln1.gamma", &lp.ln1_gamma}, {"ln1.beta", &lp.ln1_beta}, {"attn.wq", &lp.wq},
             {"attn.bq", &lp.bq},          {"attn.wk", &lp.wk},        {"attn.bk", &lp.bk},
             {"attn.wv", &lp.wv},          {"attn.bv", &lp.bv},        {"attn.wo", &lp.wo},
             {"attn.bo", &lp.bo},          {"ln2.gamma", &lp.ln2_gamma}, {"ln2.beta", &lp.ln2_beta},
             {"ffn.w1", &lp.w1},           {"ffn.b1", &lp.b1},         {"ffn.w2", &lp.w2},
             {"ffn.b2", &lp.b2}})
    {
      out.push_back({pre + name, *t});
    }
  }
  return out;
}

std::vector<ad::Tensor> EncoderParams::tensors() const
{
  std::vector<ad::Tensor> out;
  for (auto const &nt : named())
  {
    out.push_back(nt.tensor);
  }
  return out;
}

std::size_t EncoderParams::parameter_count() const
{
  std::size_t total = 0;
  for (auto const &nt : named())
  {
    total += nt.tensor.numel();
  }
  return total;
}

void EncoderParams::set_requires_grad(bool flag)
{
  for (auto &t : tensors())
  {
    t.set_requires_grad(flag);
  }
}

EncoderParams EncoderParams::clone() const
{
  EncoderParams c = *this;
  auto copy = [](ad::Tensor &t) {
    bool const rg = t.requires_grad();
    t             = t.detach();
    t.set_requires_grad(rg);
  };
  copy(c.in_w);
  copy(c.in_b);
  for (auto &lp : c.layers)
  {
    for (ad::Tensor *t : {&lp.ln1_gamma, &lp.ln1_beta, &lp.wq, &lp.bq, &lp.wk, &lp.bk, &lp.wv,
                          &lp.bv, &lp.wo, &lp.bo, &lp.ln2_gamma, &lp.ln2_beta, &lp.w1, &lp.b1,
                          &lp.w2, &lp.b2})
    {
      copy(*t);
    }
  }
  return c;
}

ad::Tensor mha(ad::Tape &tape, ad::Tensor const &x, ad::Mask const &mask, LayerParams const &p,
               std::size_t tokens, std::size_t heads)
{
  std::size_t const hidden = x.cols();
  if (hidden % heads != 0)
  {
    throw InvalidArgument("mha: hidden not divisible by heads");
  }
  float const scale = 1.0f / std::sqrt(static_cast<float>(hidden / heads));
  auto        q     = ad::split_heads(tape, linear(tape, x, p.wq, p.bq), tokens, heads);
  auto        k     = ad::split_heads(tape, linear(tape, x, p.wk, p.bk), tokens, heads);
  auto        v     = ad::split_heads(tape, linear(tape, x, p.wv, p.bv), tokens, heads);
  auto scores  = ad::scale(tape, ad::bmm(tape, q, k, true), scale);
  auto weights = ad::masked_softmax(tape, scores, mask, heads);
  auto context = ad::merge_heads(tape, ad::bmm(tape, weights, v, false), tokens, heads);
  return linear(tape, context, p.wo, p.bo);
}

ad::Tensor encoder_layer(ad::Tape &tape, ad::Tensor const &x, ad::Mask const &mask,
                         LayerParams const &p, EncoderConfig const &config, std::size_t tokens,
                         std::mt19937_64 &rng)
{
  auto attn = mha(tape, ad::layer_norm(tape, x, p.ln1_gamma, p.ln1_beta), mask, p, tokens,
                  config.heads);
  auto h    = ad::add(tape, x, ad::dropout(tape, attn, config.dropout, rng));
  auto ff   = linear(tape, ad::layer_norm(tape, h, p.ln2_gamma, p.ln2_beta), p.w1, p.b1);
  ff        = linear(tape, ad::gelu(tape, ff), p.w2, p.b2);
  return ad::add(tape, h, ad::dropout(tape, ff, config.dropout, rng));
}

EmbeddingPair gt_forward(ad::Tape &tape, ad::Tensor const &hidden_tokens, ad::Mask const &mask,
                         EncoderParams const &params, std::size_t tokens, std::mt19937_64 &rng)
{
  ad::Tensor h = hidden_tokens;
  for (auto const &lp : params.layers)
  {
    h = encoder_layer(tape, h, mask, lp, params.config, tokens, rng);
  }
  if (tokens == 1)
  {
    warn("gt_forward: single-token sequences carry no community tokens; com embedding is zero");
  }
  return {ad::select_token(tape, h, tokens, 0), ad::masked_token_mean(tape, h, mask, tokens, 1)};
}

EmbeddingPair encode(ad::Tape &tape, ad::Tensor const &tokens_in, ad::Mask const &mask,
                     EncoderParams const &params, std::size_t tokens, std::mt19937_64 &rng)
{
  if (tokens_in.cols() != params.config.input_dim)
  {
    throw InvalidArgument("encode: token width " + std::to_string(tokens_in.cols()) +
                          " does not match encoder input " + std::to_string(params.config.input_dim));
  }
  return gt_forward(tape, linear(tape, tokens_in, params.in_w, params.in_b), mask, params, tokens,
                    rng);
}

}  // namespace unicom
