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

#include "unicom/ugl.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "tensor_store.hpp"
#include "unicom/cohesive.hpp"
#include "unicom/error.hpp"
#include "unicom/optim.hpp"

namespace unicom {

namespace {

Matrix to_matrix(ad::Tensor const &t)
{
  return Matrix(t.rows(), t.cols(), std::vector<float>(t.data().begin(), t.data().end()));
}

store::Json encoder_json(EncoderConfig const &c)
{
  return {{"input_dim", c.input_dim}, {"hidden", c.hidden},   {"heads", c.heads},
          {"layers", c.layers},       {"ffn_dim", c.ffn_dim}, {"dropout", c.dropout}};
}

EncoderConfig encoder_from_json(store::Json const &j)
{
  EncoderConfig c;
  c.input_dim = j.at("input_dim").get<std::size_t>();
  c.hidden    = j.at("hidden").get<std::size_t>();
  c.heads     = j.at("heads").get<std::size_t>();
  c.layers    = j.at("layers").get<std::size_t>();
  c.ffn_dim   = j.at("ffn_dim").get<std::size_t>();
  c.dropout   = j.at("dropout").get<float>();
  c.validate();
  return c;
}

}  // namespace

PairSample sample_negatives(std::size_t n_nodes, std::size_t per_node, std::mt19937_64 &rng)
{
  PairSample out;
  if (n_nodes < 2)
  {
    return out;
  }
  std::uniform_int_distribution<NodeId> pick(0, n_nodes - 2);
  out.u.reserve(n_nodes * per_node);
  out.v.reserve(n_nodes * per_node);
  for (NodeId v = 0; v < n_nodes; ++v)
  {
    for (std::size_t k = 0; k < per_node; ++k)
    {
      NodeId u = pick(rng);
      u += u >= v ? 1 : 0;
      out.u.push_back(u);
      out.v.push_back(v);
    }
  }
  return out;
}

PairSample all_negatives(std::size_t n_nodes)
{
  PairSample out;
  for (NodeId v = 0; v < n_nodes; ++v)
  {
    for (NodeId u = 0; u < n_nodes; ++u)
    {
      if (u != v)
      {
        out.u.push_back(u);
        out.v.push_back(v);
      }
    }
  }
  return out;
}

PairSample edge_pairs(Graph const &g)
{
  PairSample out;
  for (auto const &e : g.edge_list())
  {
    out.u.push_back(e.u);
    out.v.push_back(e.v);
  }
  return out;
}

PairSample sample_non_edges(Graph const &g, std::size_t count, std::mt19937_64 &rng)
{
  std::size_t const n        = g.num_nodes();
  std::size_t const possible = n < 2 ? 0 : n * (n - 1) / 2 - g.num_edges();
  PairSample        out;
  if (possible == 0)
  {
    return out;
  }
  std::uniform_int_distribution<NodeId> pick(0, n - 1);
  std::size_t const                     max_tries = 100 * count + 1000;
  for (std::size_t tries = 0; out.size() < count && tries < max_tries; ++tries)
  {
    NodeId const u = pick(rng);
    NodeId const v = pick(rng);
    if (u != v && !g.has_edge(u, v))
    {
      out.u.push_back(u);
      out.v.push_back(v);
    }
  }
  return out;
}

PairSample all_non_edges(Graph const &g)
{
  PairSample out;
  for (NodeId u = 0; u < g.num_nodes(); ++u)
  {
    for (NodeId v = u + 1; v < g.num_nodes(); ++v)
    {
      if (!g.has_edge(u, v))
      {
        out.u.push_back(u);
        out.v.push_back(v);
      }
    }
  }
  return out;
}

ad::Tensor margin_loss(ad::Tape &tape, ad::Tensor const &node, ad::Tensor const &com,
                       PairSample const &negatives, float margin)
{
  if (negatives.size() == 0)
  {
    throw InvalidArgument("margin_loss: no negative pairs");
  }
  auto const pos     = ad::sigmoid(tape, ad::rowdot(tape, node, com));
  auto const com_v   = ad::gather_rows(tape, com, negatives.v);
  auto const node_u  = ad::gather_rows(tape, node, negatives.u);
  auto const neg     = ad::sigmoid(tape, ad::rowdot(tape, node_u, com_v));
  auto const pos_v   = ad::gather_rows(tape, pos, negatives.v);
  auto const hinge   = ad::relu(tape, ad::add_scalar(tape, ad::sub(tape, pos_v, neg), margin));
  return ad::scale(tape, ad::mean(tape, hinge), -1.0f);
}

ad::Tensor recon_loss(ad::Tape &tape, ad::Tensor const &node, PairSample const &edges,
                      PairSample const &non_edges)
{
  std::size_t const total = edges.size() + non_edges.size();
  if (total == 0)
  {
    throw InvalidArgument("recon_loss: no pairs");
  }
  float const inv  = 1.0f / static_cast<float>(total);
  auto const  unit = ad::l2_normalize_rows(tape, node);
  ad::Tensor  acc;
  auto        add_term = [&](PairSample const &p, float sign) {
    if (p.size() == 0)
    {
      return;
    }
    auto dots = ad::rowdot(tape, ad::gather_rows(tape, unit, p.u), ad::gather_rows(tape, unit, p.v));
    auto term = ad::scale(tape, ad::sum(tape, dots), sign * inv);
    acc       = acc.defined() ? ad::add(tape, acc, term) : term;
  };
  add_term(non_edges, 1.0f);
  add_term(edges, -1.0f);
  return acc;
}

void UglConfig::validate() const
{
  if (!(beta > 0.0f))
  {
    throw InvalidArgument("beta must be positive");
  }
  if (!(lr > 0.0f))
  {
    throw InvalidArgument("learning rate must be positive");
  }
  if (!(margin >= 0.0f))
  {
    throw InvalidArgument("margin must be non-negative");
  }
  if (epochs == 0 || negatives == 0 || anchors == 0)
  {
    throw InvalidArgument("epochs, negatives and anchors must be positive");
  }
}

Embeddings embed(EncoderParams const &params, TokenTensor const &tokens)
{
  ad::Tape        tape(false);
  std::mt19937_64 unused(0);
  auto            e = encode(tape, tokens.as_tensor(), tokens.mask, params, tokens.tokens, unused);
  return {to_matrix(e.node), to_matrix(e.com)};
}

Matrix anchor_features(TokenTensor const &tokens, std::size_t count, std::uint64_t seed)
{
  Matrix const  pooled = tokens.pooled();
  KMeansOptions opt;
  opt.seed     = seed;
  opt.restarts = 3;
  return kmeans(pooled, std::min(count, pooled.rows), opt).centroids;
}

ExpertCheckpoint pretrain(Graph const &g, Preprocessed const &data, UglConfig const &config)
{
  config.validate();
  TokenTensor const &tok = data.tokens;

  EncoderConfig enc = config.encoder;
  enc.input_dim     = tok.width;
  enc.validate();

  ExpertCheckpoint ckpt;
  ckpt.preprocess = config.preprocess;
  ckpt.source_dim = g.feature_dim();
  ckpt.params     = EncoderParams::init(enc, config.seed);
  ckpt.params.set_requires_grad(true);

  auto            params = ckpt.params.tensors();
  ad::AdamOptions opt;
  opt.learning_rate = config.lr;
  ad::AdamState adam(params, opt);

  ad::Tensor const x = tok.as_tensor();
  PairSample const edges = edge_pairs(g);
  PairSample const full_neg   = config.full_pairs ? all_negatives(g.num_nodes()) : PairSample{};
  PairSample const full_non   = config.full_pairs ? all_non_edges(g) : PairSample{};
  PairSample const full_edges = [&] {
    if (!config.full_pairs)
    {
      return edges;
    }
    PairSample both = edges;
    both.u.insert(both.u.end(), edges.v.begin(), edges.v.end());
    both.v.insert(both.v.end(), edges.u.begin(), edges.u.end());
    return both;
  }();

  std::mt19937_64 sample_rng(config.seed ^ 0x9e3779b97f4a7c15ull);
  std::mt19937_64 dropout_rng(config.seed ^ 0xd1b54a32d192ed03ull);

  double      best  = std::numeric_limits<double>::infinity();
  std::size_t stall = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch)
  {
    ad::zero_grads(params);
    ad::Tape   tape(true);
    auto const emb = encode(tape, x, tok.mask, ckpt.params, tok.tokens, dropout_rng);

    PairSample const neg = config.full_pairs ? full_neg : sample_negatives(g.num_nodes(), config.negatives, sample_rng);
    PairSample const non = config.full_pairs ? full_non : sample_non_edges(g, edges.size(), sample_rng);

    auto loss = margin_loss(tape, emb.node, emb.com, neg, config.margin);
    if (full_edges.size() + non.size() > 0)
    {
      loss = ad::add(tape, loss, ad::scale(tape, recon_loss(tape, emb.node, full_edges, non), config.beta));
    }
    double const value = loss.item();
    if (!std::isfinite(value))
    {
      throw NumericalError("pretrain: non-finite loss at epoch " + std::to_string(epoch));
    }
    tape.backward(loss);
    adam.step(params);
    ckpt.loss_history.push_back(value);

    if (value < best - config.min_delta)
    {
      best  = value;
      stall = 0;
    }
    else if (++stall >= config.patience)
    {
      break;
    }
  }
  ckpt.params.set_requires_grad(false);
  ckpt.anchors = anchor_features(tok, config.anchors, config.seed);
  return ckpt;
}

ExpertCheckpoint pretrain(Graph const &g, UglConfig const &config, std::size_t known_communities)
{
  return pretrain(g, preprocess(g, config.preprocess, known_communities), config);
}

void save_checkpoint(ExpertCheckpoint const &ckpt, std::filesystem::path const &dir)
{
  std::filesystem::create_directories(dir);
  store::Json m;
  m["format_version"] = ExpertCheckpoint::kFormatVersion;
  m["kind"]           = "expert_checkpoint";
  m["byte_order"]     = "little";
  m["encoder"]        = encoder_json(ckpt.params.config);
  m["preprocess"]     = {{"h_max", ckpt.preprocess.h_max},
                         {"pe_dim", ckpt.preprocess.pe_dim},
                         {"k_feat", ckpt.preprocess.k_feat},
                         {"seed", ckpt.preprocess.seed}};
  m["source_dim"]     = ckpt.source_dim;
  m["source_name"]    = ckpt.source_name;
  m["parameter_count"] = ckpt.params.parameter_count();
  m["loss_history"]   = ckpt.loss_history;
  m["tensors"]        = store::save_tensors(ckpt.params.named(), dir);
  m["anchors"]        = store::save_matrix(ckpt.anchors, "anchors", dir);
  store::write_manifest(m, dir);
}

ExpertCheckpoint load_checkpoint(std::filesystem::path const &dir)
{
  auto const m = store::read_manifest(dir);
  try
  {
    if (m.at("kind").get<std::string>() != "expert_checkpoint")
    {
      throw InvalidArgument(dir.string() + ": not an expert checkpoint");
    }
    if (m.at("format_version").get<int>() != ExpertCheckpoint::kFormatVersion)
    {
      throw InvalidArgument(dir.string() + ": unsupported checkpoint format");
    }
    ExpertCheckpoint ckpt;
    ckpt.params = EncoderParams::init(encoder_from_json(m.at("encoder")), 0);
    store::load_tensors(ckpt.params.named(), dir, m.at("tensors"));
    auto const &p          = m.at("preprocess");
    ckpt.preprocess.h_max  = p.at("h_max").get<std::size_t>();
    ckpt.preprocess.pe_dim = p.at("pe_dim").get<std::size_t>();
    ckpt.preprocess.k_feat = p.at("k_feat").get<std::size_t>();
    ckpt.preprocess.seed   = p.at("seed").get<std::uint64_t>();
    ckpt.source_dim        = m.at("source_dim").get<std::size_t>();
    ckpt.source_name       = m.value("source_name", std::string{});
    ckpt.loss_history      = m.value("loss_history", std::vector<double>{});
    ckpt.anchors           = store::load_matrix(m.at("anchors"), dir);
    return ckpt;
  }
  catch (store::Json::exception const &e)
  {
    throw InvalidArgument(dir.string() + ": malformed manifest: " + e.what());
  }
}

}  // namespace unicom
