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

#include "unicom/das.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <stdexcept>

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

ad::Tensor to_tensor(Matrix const &m)
{
  return ad::Tensor::from_data({m.rows, m.cols}, m.data);
}

ad::Tensor column(std::vector<float> values)
{
  std::size_t const n = values.size();
  return ad::Tensor::from_data({n, 1}, std::move(values));
}

Matrix gather(Matrix const &m, std::span<NodeId const> rows)
{
  Matrix out(rows.size(), m.cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
  {
    std::copy(m.row(rows[i]).begin(), m.row(rows[i]).end(), out.row(i).begin());
  }
  return out;
}

}  // namespace

std::string task_name(Task task)
{
  switch (task)
  {
  case Task::cs:
    return "cs";
  case Task::dcd:
    return "dcd";
  case Task::ocd:
    return "ocd";
  }
  return "unknown";
}

Task parse_task(std::string const &name)
{
  for (Task t : {Task::cs, Task::dcd, Task::ocd})
  {
    if (task_name(t) == name)
    {
      return t;
    }
  }
  throw InvalidArgument("unknown task '" + name + "' (expected cs, dcd or ocd)");
}

Adapter Adapter::init(Task task, std::size_t target_width, std::size_t source_width,
                      std::size_t n_prompts, std::uint64_t seed)
{
  if (target_width == 0 || source_width == 0 || n_prompts == 0)
  {
    throw InvalidArgument("Adapter: widths and prompt count must be positive");
  }
  std::mt19937_64 rng(seed);
  Adapter         a;
  a.task  = task;
  a.keys  = xavier_uniform(n_prompts, target_width, rng);
  a.basis = ad::Tensor::zeros({n_prompts, target_width});
  if (target_width == source_width)
  {
    a.proj_w = ad::Tensor::zeros({target_width, source_width});
    for (std::size_t i = 0; i < target_width; ++i)
    {
      a.proj_w.data()[i * source_width + i] = 1.0f;
    }
  }
  else
  {
    a.proj_w = xavier_uniform(target_width, source_width, rng);
  }
  a.proj_b = ad::Tensor::zeros({source_width});
  return a;
}

std::vector<NamedTensor> Adapter::named() const
{
  std::vector<NamedTensor> out{
      {"prompt.keys", keys}, {"prompt.basis", basis}, {"proj.weight", proj_w}, {"proj.bias", proj_b}};
  if (decoder)
  {
    for (auto const &nt : decoder->named())
    {
      out.push_back(nt);
    }
  }
  return out;
}

std::vector<ad::Tensor> Adapter::tensors() const
{
  std::vector<ad::Tensor> out;
  for (auto const &nt : named())
  {
    out.push_back(nt.tensor);
  }
  return out;
}

std::size_t Adapter::parameter_count() const
{
  std::size_t total = 0;
  for (auto const &t : tensors())
  {
    total += t.numel();
  }
  return total;
}

void Adapter::set_requires_grad(bool flag)
{
  for (auto &t : tensors())
  {
    t.set_requires_grad(flag);
  }
}

ad::Tensor prompt_weights(ad::Tape &tape, ad::Tensor const &x, ad::Tensor const &keys)
{
  return ad::softmax_rows(tape, ad::matmul_nt(tape, x, keys));
}

ad::Tensor adaptation_prompt(ad::Tape &tape, ad::Tensor const &x, ad::Mask const &mask,
                             ad::Tensor const &keys, ad::Tensor const &basis)
{
  if (x.cols() != basis.cols() || keys.cols() != basis.cols() || keys.rows() != basis.rows())
  {
    throw InvalidArgument("adaptation_prompt: token, key and basis widths differ");
  }
  if (mask.size() != x.rows())
  {
    throw InvalidArgument("adaptation_prompt: mask length does not match token rows");
  }
  auto const prompt = ad::matmul(tape, prompt_weights(tape, x, keys), basis);
  return ad::add(tape, x, ad::mask_rows(tape, prompt, mask));
}

ad::Tensor project(ad::Tape &tape, ad::Tensor const &x, ad::Mask const &mask, ad::Tensor const &w,
                   ad::Tensor const &b)
{
  if (x.cols() != w.dim(0) || b.numel() != w.dim(1))
  {
    throw InvalidArgument("project: width mismatch");
  }
  if (mask.size() != x.rows())
  {
    throw InvalidArgument("project: mask length does not match token rows");
  }
  return ad::mask_rows(tape, ad::add_rowvec(tape, ad::matmul(tape, x, w), b), mask);
}

std::vector<NodeId> select_challenging_nodes(Matrix const &anchors, Matrix const &pooled,
                                             std::size_t count)
{
  if (anchors.rows == 0 || anchors.cols != pooled.cols)
  {
    throw InvalidArgument("select_challenging_nodes: anchors empty or width mismatch");
  }
  if (count > pooled.rows)
  {
    throw InvalidArgument("select_challenging_nodes: count exceeds node count");
  }
  std::vector<double> best(pooled.rows, -std::numeric_limits<double>::infinity());
  for (NodeId v = 0; v < pooled.rows; ++v)
  {
    for (std::size_t a = 0; a < anchors.rows; ++a)
    {
      best[v] = std::max(best[v], cosine(pooled.row(v), anchors.row(a)));
    }
  }
  std::vector<NodeId> order(pooled.rows);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return best[a] < best[b]; });
  order.resize(count);
  return order;
}

double median_bandwidth(Matrix const &a, Matrix const &b)
{
  if (a.cols != b.cols)
  {
    throw InvalidArgument("median_bandwidth: width mismatch");
  }
  std::vector<std::span<float const>> rows;
  for (std::size_t i = 0; i < a.rows; ++i)
  {
    rows.push_back(a.row(i));
  }
  for (std::size_t i = 0; i < b.rows; ++i)
  {
    rows.push_back(b.row(i));
  }
  std::vector<double> dist;
  for (std::size_t i = 0; i < rows.size(); ++i)
  {
    for (std::size_t j = i + 1; j < rows.size(); ++j)
    {
      dist.push_back(std::sqrt(squared_distance(rows[i], rows[j])));
    }
  }
  if (dist.empty())
  {
    return 1.0;
  }
  std::sort(dist.begin(), dist.end());
  std::size_t const h      = dist.size() / 2;
  double const      median = dist.size() % 2 ? dist[h] : 0.5 * (dist[h - 1] + dist[h]);
  return median > 0.0 ? median : 1.0;
}

ad::Tensor cmmd_loss(ad::Tape &tape, ad::Tensor const &target, ad::Tensor const &source,
                     double sigma)
{
  if (target.rows() == 0 || source.rows() == 0)
  {
    throw InvalidArgument("cmmd_loss: empty point set");
  }
  if (target.cols() != source.cols())
  {
    throw InvalidArgument("cmmd_loss: width mismatch");
  }
  if (!(sigma > 0.0))
  {
    throw InvalidArgument("cmmd_loss: bandwidth must be positive");
  }
  float const gamma  = static_cast<float>(-1.0 / (2.0 * sigma * sigma));
  auto        kernel = [&](ad::Tensor const &a, ad::Tensor const &b) {
    return ad::mean(tape, ad::exp(tape, ad::scale(tape, ad::pairwise_sqdist(tape, a, b), gamma)));
  };
  auto const tt = kernel(target, target);
  auto const ts = kernel(target, source);
  auto const ss = kernel(source, source);
  return ad::add(tape, ad::sub(tape, tt, ad::scale(tape, ts, 2.0f)), ss);
}

ad::Tensor cs_loss(ad::Tape &tape, ad::Tensor const &rep, std::span<Query const> queries)
{
  std::size_t const n = rep.rows();
  std::vector<std::size_t> members, segment;
  std::vector<std::size_t> pair_query, pair_node;
  std::vector<float>       pos_weight, neg_weight;
  std::size_t              used = 0;
  for (auto const &q : queries)
  {
    std::size_t const labelled = q.positives.size() + q.negatives.size();
    if (labelled == 0)
    {
      continue;
    }
    if (q.nodes.empty())
    {
      throw InvalidArgument("cs_loss: query " + q.id + " has no nodes");
    }
    for (NodeId v : q.nodes)
    {
      if (v >= n)
      {
        throw InvalidArgument("cs_loss: query node out of range");
      }
      members.push_back(v);
      segment.push_back(used);
    }
    float const w = 1.0f / static_cast<float>(labelled);
    for (auto const *list : {&q.positives, &q.negatives})
    {
      bool const positive = list == &q.positives;
      for (NodeId v : *list)
      {
        if (v >= n)
        {
          throw InvalidArgument("cs_loss: labelled node out of range");
        }
        pair_query.push_back(used);
        pair_node.push_back(v);
        pos_weight.push_back(positive ? w : 0.0f);
        neg_weight.push_back(positive ? 0.0f : w);
      }
    }
    ++used;
  }
  if (used == 0)
  {
    throw InvalidArgument("cs_loss: no query carries labelled nodes");
  }
  for (auto *w : {&pos_weight, &neg_weight})
  {
    for (auto &x : *w)
    {
      x /= static_cast<float>(used);
    }
  }
  auto const qemb   = ad::segment_mean(tape, ad::gather_rows(tape, rep, members), segment, used);
  auto const dots   = ad::rowdot(tape, ad::gather_rows(tape, qemb, pair_query),
                                 ad::gather_rows(tape, rep, pair_node));
  auto const logits = ad::scale(tape, dots, 1.0f / std::sqrt(static_cast<float>(rep.cols())));
  auto const p      = ad::clamp(tape, ad::sigmoid(tape, logits), 1e-7f, 1.0f - 1e-7f);
  auto const log_p  = ad::log(tape, p);
  auto const log_q  = ad::log(tape, ad::add_scalar(tape, ad::scale(tape, p, -1.0f), 1.0f));
  auto const ll     = ad::add(tape, ad::mul(tape, log_p, column(std::move(pos_weight))),
                              ad::mul(tape, log_q, column(std::move(neg_weight))));
  return ad::scale(tape, ad::sum(tape, ll), -1.0f);
}

ad::Tensor dcd_loss(ad::Tape &tape, ad::Tensor const &node, ad::Tensor const &com,
                    std::span<std::size_t const> labels, std::size_t k, double tau)
{
  std::size_t const n = node.rows();
  if (k < 2)
  {
    throw InvalidArgument("dcd_loss: need at least two clusters");
  }
  if (labels.size() != n || com.rows() != n || com.cols() != node.cols())
  {
    throw InvalidArgument("dcd_loss: shape mismatch");
  }
  if (!(tau > 0.0 && tau <= 1.0))
  {
    throw InvalidArgument("dcd_loss: tau must lie in (0, 1]");
  }
  auto const cos = ad::cosine_similarity(tape, node, com);

  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t v = 0; v < n; ++v)
  {
    if (labels[v] >= k)
    {
      throw InvalidArgument("dcd_loss: label out of range");
    }
    members[labels[v]].push_back(v);
  }
  auto const               c = cos.data();
  std::vector<std::size_t> confident;
  for (auto &m : members)
  {
    std::stable_sort(m.begin(), m.end(), [&](std::size_t a, std::size_t b) { return c[a] > c[b]; });
    auto const take = static_cast<std::size_t>(std::ceil(tau * static_cast<double>(m.size())));
    confident.insert(confident.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(take));
  }
  auto const distance = ad::add_scalar(tape, ad::scale(tape, ad::gather_rows(tape, cos, confident), -2.0f), 2.0f);
  auto const term1    = ad::scale(tape, ad::sum(tape, distance), 1.0f / static_cast<float>(k));

  auto const cn = ad::l2_normalize_rows(tape, ad::segment_mean(tape, node, labels, k));
  auto const cc = ad::l2_normalize_rows(tape, ad::segment_mean(tape, com, labels, k));
  std::vector<float> off(k * k, 1.0f);
  for (std::size_t i = 0; i < k; ++i)
  {
    off[i * k + i] = 0.0f;
  }
  auto const s     = ad::mul(tape, ad::matmul_nt(tape, cn, cc), ad::Tensor::from_data({k, k}, std::move(off)));
  auto const term2 = ad::sum(tape, ad::mul(tape, s, s));
  return ad::add(tape, term1, term2);
}

ad::Tensor dcd_loss(ad::Tape &tape, ad::Tensor const &node, ad::Tensor const &com, std::size_t k,
                    double tau, std::uint64_t seed)
{
  if (k > node.rows())
  {
    throw InvalidArgument("dcd_loss: more clusters than nodes");
  }
  KMeansOptions opt;
  opt.seed          = seed;
  auto const labels = kmeans(to_matrix(node), k, opt).labels;
  return dcd_loss(tape, node, com, labels, k, tau);
}

ad::Tensor ocd_loss(ad::Tape &tape, ad::Tensor const &y, PairSample const &edges,
                    PairSample const &non_edges, float eps)
{
  if (edges.size() + non_edges.size() == 0)
  {
    throw InvalidArgument("ocd_loss: no pairs");
  }
  if (!(eps >= 0.0f))
  {
    throw InvalidArgument("ocd_loss: offset must be non-negative");
  }
  auto pair_dots = [&](PairSample const &p) {
    return ad::rowdot(tape, ad::gather_rows(tape, y, p.u), ad::gather_rows(tape, y, p.v));
  };
  ad::Tensor loss;
  if (edges.size() > 0)
  {
    loss = ad::mean(tape, ad::neg_log1mexp(tape, ad::add_scalar(tape, pair_dots(edges), eps)));
  }
  if (non_edges.size() > 0)
  {
    auto const term = ad::mean(tape, pair_dots(non_edges));
    loss            = loss.defined() ? ad::add(tape, loss, term) : term;
  }
  return loss;
}

void DasConfig::validate() const
{
  if (!(alpha >= 0.01f && alpha <= 1.0f))
  {
    throw InvalidArgument("alpha must lie in [0.01, 1]");
  }
  if (!(lr > 0.0f))
  {
    throw InvalidArgument("learning rate must be positive");
  }
  if (epochs == 0 || n_prompts == 0 || decoder_hidden == 0 || non_edge_factor == 0 || negatives == 0)
  {
    throw InvalidArgument("epochs, prompts, decoder width, non-edge factor and negatives must be positive");
  }
  if (!(tau > 0.0 && tau <= 1.0))
  {
    throw InvalidArgument("tau must lie in (0, 1]");
  }
  if (!(ocd_eps >= 0.0f) || !(beta > 0.0f) || !(margin >= 0.0f))
  {
    throw InvalidArgument("offset and margin must be non-negative, beta positive");
  }
}

std::uint64_t backbone_digest(EncoderParams const &params)
{
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (auto const &nt : params.named())
  {
    auto const data = nt.tensor.data();
    auto const *p   = reinterpret_cast<unsigned char const *>(data.data());
    for (std::size_t i = 0; i < data.size_bytes(); ++i)
    {
      h = (h ^ p[i]) * 0x100000001b3ull;
    }
  }
  return h;
}

Preprocessed preprocess_target(Graph const &g, ExpertCheckpoint const &ckpt,
                               std::size_t known_communities)
{
  return preprocess(g, ckpt.preprocess, known_communities);
}

namespace {

struct Forward
{
  ad::Tensor    pooled;  // masked token mean of Z, one row per node
  EmbeddingPair emb;
};

Forward forward(ad::Tape &tape, ad::Tensor const &x, TokenTensor const &tokens,
                EncoderParams const &params, Adapter const &a)
{
  std::mt19937_64 unused(0);
  auto const      xa = adaptation_prompt(tape, x, tokens.mask, a.keys, a.basis);
  auto const      z  = project(tape, xa, tokens.mask, a.proj_w, a.proj_b);
  return {ad::masked_token_mean(tape, z, tokens.mask, tokens.tokens, 0),
          encode(tape, z, tokens.mask, params, tokens.tokens, unused)};
}

void check_widths(ExpertCheckpoint const &ckpt, Adapter const &adapter, TokenTensor const &tokens)
{
  if (tokens.width != adapter.target_width())
  {
    throw InvalidArgument("adapter expects token width " + std::to_string(adapter.target_width()) +
                          ", target has " + std::to_string(tokens.width));
  }
  if (adapter.source_width() != ckpt.params.config.input_dim)
  {
    throw InvalidArgument("adapter output width does not match the checkpoint encoder");
  }
}

}  // namespace

DasResult das_train(Graph const &g, TokenTensor const &tokens, ExpertCheckpoint const &ckpt,
                    std::span<Query const> queries, DasConfig const &config)
{
  config.validate();
  std::size_t const n = g.num_nodes();
  if (tokens.nodes != n)
  {
    throw InvalidArgument("das_train: token tensor does not match the graph");
  }
  if (ckpt.anchors.rows == 0 || ckpt.anchors.cols != ckpt.params.config.input_dim)
  {
    throw InvalidArgument("das_train: checkpoint anchors missing or of the wrong width");
  }
  std::size_t const k = config.communities;
  switch (config.task)
  {
  case Task::cs:
    if (queries.empty())
    {
      throw InvalidArgument("das_train: community search needs training queries");
    }
    break;
  case Task::dcd:
    if (k < 2 || k > n)
    {
      throw InvalidArgument("das_train: detection needs 2 <= K <= |V|");
    }
    break;
  case Task::ocd:
    if (k < 1 || k > n)
    {
      throw InvalidArgument("das_train: detection needs 1 <= K <= |V|");
    }
    if (g.num_edges() == 0)
    {
      throw InvalidArgument("das_train: overlapping detection needs at least one edge");
    }
    break;
  }

  std::uint64_t const digest = backbone_digest(ckpt.params);
  EncoderParams       frozen = ckpt.params.clone();
  frozen.set_requires_grad(false);

  std::size_t const hidden = frozen.config.hidden;
  DasResult         res;
  Adapter          &a = res.adapter;
  a = Adapter::init(config.task, tokens.width, frozen.config.input_dim, config.n_prompts, config.seed);
  if (config.task != Task::cs)
  {
    a.communities = k;
  }
  if (config.task == Task::ocd)
  {
    a.decoder = OcdDecoder::init(2 * hidden, config.decoder_hidden, k, config.seed + 1);
  }
  a.set_requires_grad(true);

  auto            params = a.tensors();
  ad::AdamOptions opt;
  opt.learning_rate = config.lr;
  ad::AdamState adam(params, opt);

  ad::Tensor const  x       = tokens.as_tensor();
  ad::Tensor const  anchors = to_tensor(ckpt.anchors);
  std::size_t const count   = std::min(ckpt.anchors.rows, n);
  PairSample const  edges   = edge_pairs(g);
  std::mt19937_64   rng(config.seed ^ 0x9e3779b97f4a7c15ull);

  double      best  = std::numeric_limits<double>::infinity();
  std::size_t stall = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch)
  {
    ad::zero_grads(params);
    ad::Tape   tape(false);
    auto const f = forward(tape, x, tokens, frozen, a);

    Matrix const pooled   = to_matrix(f.pooled);
    auto const   chosen   = select_challenging_nodes(ckpt.anchors, pooled, count);
    double const sigma    = median_bandwidth(gather(pooled, chosen), ckpt.anchors);
    auto const   cmmd     = cmmd_loss(tape, ad::gather_rows(tape, f.pooled, chosen), anchors, sigma);

    ad::Tensor task;
    switch (config.task)
    {
    case Task::cs:
      task = cs_loss(tape, ad::concat_cols(tape, std::vector<ad::Tensor>{f.emb.node, f.emb.com}), queries);
      break;
    case Task::dcd:
    {
      task = dcd_loss(tape, f.emb.node, f.emb.com, k, config.tau, config.seed + epoch);
      auto const neg = sample_negatives(n, config.negatives, rng);
      task           = ad::add(tape, task, margin_loss(tape, f.emb.node, f.emb.com, neg, config.margin));
      auto const non = sample_non_edges(g, edges.size(), rng);
      if (edges.size() + non.size() > 0)
      {
        task = ad::add(tape, task, ad::scale(tape, recon_loss(tape, f.emb.node, edges, non), config.beta));
      }
      break;
    }
    case Task::ocd:
    {
      auto const rep = ad::concat_cols(tape, std::vector<ad::Tensor>{f.emb.node, f.emb.com});
      auto const y   = ocd_expert(tape, rep, *a.decoder);
      auto const non = sample_non_edges(g, config.non_edge_factor * edges.size(), rng);
      task           = ocd_loss(tape, y, edges, non, config.ocd_eps);
      break;
    }
    }
    auto const   loss  = ad::add(tape, task, ad::scale(tape, cmmd, config.alpha));
    double const value = loss.item();
    if (!std::isfinite(value))
    {
      throw NumericalError("das_train: non-finite loss at epoch " + std::to_string(epoch));
    }
    tape.backward(loss);
    adam.step(params);
    res.loss.push_back(value);
    res.task_loss.push_back(task.item());
    res.cmmd.push_back(cmmd.item());

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
  a.set_requires_grad(false);
  a.loss_history = res.loss;
  if (backbone_digest(ckpt.params) != digest || backbone_digest(frozen) != digest)
  {
    throw std::logic_error("das_train: backbone parameters changed during adaptation");
  }
  res.output = run_expert(ckpt, a, tokens);
  return res;
}

ExpertOutput run_expert(ExpertCheckpoint const &ckpt, Adapter const &adapter,
                        TokenTensor const &tokens)
{
  check_widths(ckpt, adapter, tokens);
  ad::Tape     tape(false);
  auto const   f = forward(tape, tokens.as_tensor(), tokens, ckpt.params, adapter);
  ExpertOutput out;
  out.embeddings = {to_matrix(f.emb.node), to_matrix(f.emb.com)};
  if (adapter.decoder)
  {
    auto const rep  = ad::concat_cols(tape, std::vector<ad::Tensor>{f.emb.node, f.emb.com});
    out.affiliation = to_matrix(ocd_expert(tape, rep, *adapter.decoder));
  }
  return out;
}

std::filesystem::path adapter_dir(std::filesystem::path const &checkpoint_dir, Task task)
{
  return checkpoint_dir / "adapter" / task_name(task);
}

void save_adapter(Adapter const &adapter, std::filesystem::path const &dir)
{
  std::filesystem::create_directories(dir);
  store::Json m;
  m["format_version"] = Adapter::kFormatVersion;
  m["kind"]           = "adapter";
  m["byte_order"]     = "little";
  m["task"]           = task_name(adapter.task);
  m["communities"]    = adapter.communities;
  m["n_prompts"]      = adapter.keys.dim(0);
  m["target_width"]   = adapter.target_width();
  m["source_width"]   = adapter.source_width();
  m["decoder"]        = adapter.decoder ? store::Json{{"input", adapter.decoder->w1.dim(0)},
                                                      {"hidden", adapter.decoder->w1.dim(1)},
                                                      {"communities", adapter.decoder->communities()}}
                                        : store::Json(nullptr);
  m["parameter_count"] = adapter.parameter_count();
  m["loss_history"]    = adapter.loss_history;
  m["target_name"]     = adapter.target_name;
  m["tensors"]         = store::save_tensors(adapter.named(), dir);
  store::write_manifest(m, dir);
}

Adapter load_adapter(std::filesystem::path const &dir)
{
  auto const m = store::read_manifest(dir);
  try
  {
    if (m.at("kind").get<std::string>() != "adapter")
    {
      throw InvalidArgument(dir.string() + ": not an adapter");
    }
    if (m.at("format_version").get<int>() != Adapter::kFormatVersion)
    {
      throw InvalidArgument(dir.string() + ": unsupported adapter format");
    }
    Adapter a = Adapter::init(parse_task(m.at("task").get<std::string>()),
                              m.at("target_width").get<std::size_t>(),
                              m.at("source_width").get<std::size_t>(),
                              m.at("n_prompts").get<std::size_t>(), 0);
    a.communities   = m.at("communities").get<std::size_t>();
    a.loss_history  = m.value("loss_history", std::vector<double>{});
    a.target_name   = m.value("target_name", std::string{});
    auto const &dec = m.at("decoder");
    if (!dec.is_null())
    {
      a.decoder = OcdDecoder::init(dec.at("input").get<std::size_t>(), dec.at("hidden").get<std::size_t>(),
                                   dec.at("communities").get<std::size_t>(), 0);
    }
    store::load_tensors(a.named(), dir, m.at("tensors"));
    return a;
  }
  catch (store::Json::exception const &e)
  {
    throw InvalidArgument(dir.string() + ": malformed manifest: " + e.what());
  }
}

}  // namespace unicom
