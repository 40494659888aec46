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

#include "unicom/experts.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "unicom/cohesive.hpp"
#include "unicom/error.hpp"

namespace unicom {

Matrix node_representation(Matrix const &node, Matrix const &com)
{
  return hconcat(node, com);
}

std::vector<double> query_embedding(std::span<NodeId const> query, Matrix const &rep)
{
  if (query.empty())
  {
    throw InvalidArgument("query: at least one query node required");
  }
  std::vector<double> q(rep.cols);
  for (NodeId v : query)
  {
    if (v >= rep.rows)
    {
      throw InvalidArgument("query: node " + std::to_string(v) + " out of range");
    }
    for (std::size_t j = 0; j < rep.cols; ++j)
    {
      q[j] += rep(v, j);
    }
  }
  for (auto &x : q)
  {
    x /= static_cast<double>(query.size());
  }
  return q;
}

std::vector<double> cs_scores(std::span<NodeId const> query, Matrix const &rep)
{
  auto const          q     = query_embedding(query, rep);
  double const        scale = 1.0 / std::sqrt(static_cast<double>(rep.cols));
  std::vector<double> logits(rep.rows);
  for (NodeId v = 0; v < rep.rows; ++v)
  {
    double acc = 0.0;
    for (std::size_t j = 0; j < rep.cols; ++j)
    {
      acc += q[j] * rep(v, j);
    }
    logits[v] = acc * scale;
  }
  double const top = logits.empty() ? 0.0 : *std::max_element(logits.begin(), logits.end());
  double       z   = 0.0;
  for (auto &l : logits)
  {
    l = std::exp(l - top);
    z += l;
  }
  for (auto &l : logits)
  {
    l /= z;
  }
  return logits;
}

std::vector<NodeId> rank_top_r(std::span<double const> scores, std::span<NodeId const> query,
                               std::size_t r)
{
  if (r > scores.size())
  {
    throw InvalidArgument("community size " + std::to_string(r) + " exceeds node count");
  }
  std::vector<NodeId> out;
  std::vector<bool>   taken(scores.size());
  for (NodeId v : query)
  {
    if (out.size() < r && !taken.at(v))
    {
      taken[v] = true;
      out.push_back(v);
    }
  }
  std::vector<NodeId> order(scores.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return scores[a] > scores[b]; });
  for (NodeId v : order)
  {
    if (out.size() == r)
    {
      break;
    }
    if (!taken[v])
    {
      taken[v] = true;
      out.push_back(v);
    }
  }
  return out;
}

CsResult cs_expert(std::span<NodeId const> query, Matrix const &rep, std::size_t r)
{
  CsResult res;
  res.scores    = cs_scores(query, rep);
  res.community = rank_top_r(res.scores, query, r);
  return res;
}

std::vector<std::size_t> dcd_expert(Matrix const &rep, std::size_t k, std::uint64_t seed)
{
  KMeansOptions opt;
  opt.seed     = seed;
  opt.restarts = 10;
  return kmeans(rep, k, opt).labels;
}

OcdDecoder OcdDecoder::init(std::size_t input, std::size_t hidden, std::size_t k,
                            std::uint64_t seed)
{
  if (input == 0 || hidden == 0 || k == 0)
  {
    throw InvalidArgument("OcdDecoder: widths must be positive");
  }
  std::mt19937_64 rng(seed);
  OcdDecoder      d;
  d.w1 = xavier_uniform(input, hidden, rng);
  d.b1 = ad::Tensor::zeros({hidden});
  d.w2 = xavier_uniform(hidden, k, rng);
  d.b2 = ad::Tensor::zeros({k});
  return d;
}

std::vector<NamedTensor> OcdDecoder::named() const
{
  return {{"decoder.w1", w1}, {"decoder.b1", b1}, {"decoder.w2", w2}, {"decoder.b2", b2}};
}

std::vector<ad::Tensor> OcdDecoder::tensors() const
{
  return {w1, b1, w2, b2};
}

ad::Tensor ocd_expert(ad::Tape &tape, ad::Tensor const &rep, OcdDecoder const &decoder)
{
  auto h = ad::relu(tape, ad::add_rowvec(tape, ad::matmul(tape, rep, decoder.w1), decoder.b1));
  return ad::softplus(tape, ad::add_rowvec(tape, ad::matmul(tape, h, decoder.w2), decoder.b2));
}

LabelSet threshold_memberships(Matrix const &y, double threshold)
{
  LabelSet out(y.rows);
  for (std::size_t v = 0; v < y.rows; ++v)
  {
    std::size_t arg = 0;
    for (std::size_t c = 0; c < y.cols; ++c)
    {
      if (y(v, c) >= threshold)
      {
        out[v].push_back(static_cast<std::uint32_t>(c));
      }
      if (y(v, c) > y(v, arg))
      {
        arg = c;
      }
    }
    if (out[v].empty() && y.cols > 0)
    {
      out[v].push_back(static_cast<std::uint32_t>(arg));
    }
  }
  return out;
}

}  // namespace unicom
