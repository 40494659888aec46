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

// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "graphs.hpp"
#include "unicom/cohesive.hpp"
#include "unicom/error.hpp"
#include "unicom/das.hpp"
#include "unicom/fusion.hpp"
#include "unicom/runner.hpp"
#include "unicom/tokenize.hpp"

using namespace unicom;
using namespace unicom::testing;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome
{
  bool        pass = false;
  std::string detail;
};

std::string format(char const *fmt, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

fs::path scratch_root()
{
  static fs::path const root = [] {
    auto dir = fs::temp_directory_path() / "unicom_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
  }();
  return root;
}

Matrix to_matrix(ad::Tensor const &t)
{
  return Matrix(t.rows(), t.cols(), std::vector<float>(t.data().begin(), t.data().end()));
}

ad::Tensor to_tensor(Matrix const &m)
{
  return ad::Tensor::from_data({m.rows, m.cols}, m.data);
}

std::vector<std::size_t> first_labels(LabelSet const &labels)
{
  std::vector<std::size_t> out;
  for (auto const &ls : labels)
  {
    out.push_back(ls.front());
  }
  return out;
}

std::map<std::string, std::string> file_bytes(fs::path const &dir, std::string const &skip = {})
{
  std::map<std::string, std::string> out;
  for (auto const &entry : fs::recursive_directory_iterator(dir))
  {
    auto const rel = fs::relative(entry.path(), dir).generic_string();
    if (!entry.is_regular_file() || (!skip.empty() && rel.rfind(skip, 0) == 0))
    {
      continue;
    }
    std::ifstream      in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[rel] = ss.str();
  }
  return out;
}

// ---------------------------------------------------------------- criterion 1

Outcome gradient_suite()
{
  auto const       start = Clock::now();
  std::mt19937_64  rng(101);
  std::vector<std::pair<std::string, double>> errors;
  auto record = [&](std::string name, GradCheck const &g) { errors.push_back({std::move(name), g.relative_error}); };

  {
    auto t = random_tensor({5, 4}, rng);
    auto s = random_tensor({4, 4}, rng, -0.5f, 1.5f, false);
    record("cmmd", gradcheck({t}, [&](ad::Tape &tape) { return cmmd_loss(tape, t, s, 0.9); }));
  }
  {
    auto               rep = random_tensor({8, 4}, rng);
    std::vector<Query> qs{{"a", {0, 1}, {2, 3}, {6}}, {"b", {5}, {4}, {0, 7}}};
    record("cs", gradcheck({rep}, [&](ad::Tape &tape) { return cs_loss(tape, rep, qs); }));
  }
  {
    auto node = random_tensor({8, 4}, rng);
    auto com  = random_tensor({8, 4}, rng);
    std::vector<std::size_t> const labels{0, 1, 0, 1, 0, 1, 0, 1};
    record("dcd", gradcheck({node, com}, [&](ad::Tape &tape) { return dcd_loss(tape, node, com, labels, 2, 0.5); }));
  }
  {
    Graph const g     = make_graph(6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}});
    auto const  edges = edge_pairs(g);
    auto const  non   = all_non_edges(g);
    auto        y     = random_tensor({6, 3}, rng, 0.2f, 1.0f);
    record("ocd", gradcheck({y}, [&](ad::Tape &tape) { return ocd_loss(tape, y, edges, non, 1e-5f); }));
  }
  {
    auto node = random_tensor({6, 4}, rng);
    auto com  = random_tensor({6, 4}, rng);
    auto neg  = sample_negatives(6, 3, rng);
    record("margin", gradcheck({node, com}, [&](ad::Tape &tape) { return margin_loss(tape, node, com, neg, 0.5f); }));
  }
  {
    auto        node  = random_tensor({6, 4}, rng);
    Graph const g     = make_graph(6, {{0, 1}, {1, 2}, {3, 4}});
    auto const  edges = edge_pairs(g);
    auto const  non   = all_non_edges(g);
    record("reconstruction", gradcheck({node}, [&](ad::Tape &tape) { return recon_loss(tape, node, edges, non); }));
  }
  {
    EncoderConfig cfg;
    cfg.input_dim = 4;
    cfg.hidden    = 8;
    cfg.heads     = 2;
    cfg.layers    = 1;
    cfg.dropout   = 0.0f;
    auto params   = EncoderParams::init(cfg, 5);
    params.set_requires_grad(true);
    std::size_t const nodes = 2, tokens = 4;
    auto              x     = random_tensor({nodes * tokens, 4}, rng);
    ad::Mask const    mask{1, 1, 1, 0, 1, 1, 1, 1};
    auto const        wn    = random_tensor({nodes, 8}, rng, -1, 1, false);
    auto const        wc    = random_tensor({nodes, 8}, rng, -1, 1, false);
    auto              leaves = params.tensors();
    leaves.push_back(x);
    record("encoder", gradcheck(leaves, [&](ad::Tape &tape) {
             std::mt19937_64 unused(0);
             auto const      e = encode(tape, x, mask, params, tokens, unused);
             return ad::add(tape, weighted_sum(tape, e.node, wn), weighted_sum(tape, e.com, wc));
           }));
  }

  double const elapsed = seconds_since(start);
  double       worst   = 0.0;
  std::string  names;
  for (auto const &[name, err] : errors)
  {
    worst = std::max(worst, err);
    names += (names.empty() ? "" : " ") + name + format("=%.1e", err);
  }
  return {worst < 1e-3 && elapsed < 30.0, names + format(", %.2fs", elapsed)};
}

// ---------------------------------------------------------------- criterion 2

struct Fraction
{
  std::uint64_t num = 0;
  std::uint64_t den = 0;
};

Fraction conductance_fraction(std::vector<Edge> const &edges, std::vector<bool> const &in)
{
  std::uint64_t cut = 0, vin = 0, vout = 0;
  for (auto const &e : edges)
  {
    (in[e.u] ? vin : vout) += 1;
    (in[e.v] ? vin : vout) += 1;
    cut += in[e.u] != in[e.v] ? 1 : 0;
  }
  return {cut, std::min(vin, vout)};
}

Outcome conductance_agreement()
{
  std::mt19937_64 rng(202);
  std::size_t     mismatches = 0, checked = 0;
  for (int graph = 0; graph < 25; ++graph)
  {
    Graph const g     = erdos_renyi(8, 0.2 + 0.02 * graph, rng);
    auto const  edges = g.edge_list();
    for (unsigned mask = 0; mask < 256; ++mask)
    {
      std::vector<bool>   in(8);
      std::vector<NodeId> members;
      for (NodeId v = 0; v < 8; ++v)
      {
        in[v] = (mask >> v) & 1u;
        if (in[v])
        {
          members.push_back(v);
        }
      }
      auto const want  = conductance_fraction(edges, in);
      auto const terms = conductance_terms(g, members);
      double const value    = conductance(g, members);
      double const expected = want.den == 0 ? 1.0 : static_cast<double>(want.num) / static_cast<double>(want.den);
      bool const   same     = terms.cut == want.num && terms.denom == want.den && value == expected;
      mismatches += same ? 0 : 1;
      ++checked;
    }
  }
  Graph const               example = example_graph();
  std::vector<NodeId> const hop1{0, 1, 2, 3, 4};
  auto const                t   = conductance_terms(example, hop1);
  bool const                ex  = t.cut * 3 == t.denom && conductance(example, hop1) == 1.0 / 3.0;
  return {mismatches == 0 && ex,
          format("%zu/%zu subsets agree, example %llu/%llu", checked - mismatches, checked,
                 static_cast<unsigned long long>(t.cut), static_cast<unsigned long long>(t.denom))};
}

// ---------------------------------------------------------------- criterion 3

bool fraction_less(Fraction a, Fraction b)
{
  a = a.den == 0 ? Fraction{1, 1} : a;
  b = b.den == 0 ? Fraction{1, 1} : b;
  return a.num * b.den < b.num * a.den;
}

Outcome hop_selection()
{
  std::mt19937_64 rng(303);
  std::size_t     mismatches = 0, nodes = 0;
  for (int graph = 0; graph < 20; ++graph)
  {
    std::size_t const n     = 10 + 2 * static_cast<std::size_t>(graph);
    Graph const       g     = erdos_renyi(n, 3.0 / static_cast<double>(n), rng);
    auto const        dist  = all_pairs_hops(g);
    auto const        edges = g.edge_list();
    auto const        got   = select_local_hops(g, 5);
    for (NodeId v = 0; v < n; ++v)
    {
      std::size_t best = 0;
      Fraction    best_c{};
      for (std::size_t h = 0; h <= 5; ++h)
      {
        std::vector<bool> in(n);
        for (NodeId u = 0; u < n; ++u)
        {
          in[u] = dist[v][u] <= static_cast<int>(h);
        }
        auto const c = conductance_fraction(edges, in);
        if (h == 0 || fraction_less(c, best_c))
        {
          best   = h;
          best_c = c;
        }
      }
      mismatches += got[v] == best ? 0 : 1;
      ++nodes;
    }
  }
  return {mismatches == 0, format("%zu/%zu nodes agree", nodes - mismatches, nodes)};
}

// ---------------------------------------------------------------- criterion 4

Outcome louvain_moves()
{
  std::size_t violations = 0, moves = 0;
  double      worst      = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < 10; ++seed)
  {
    std::mt19937_64 rng(400 + seed);
    Graph const     g = planted_partition(60, 2, 0.5, 0.02, rng);
    LouvainOptions  opt;
    opt.seed         = seed;
    opt.verify_moves = true;
    auto const res   = louvain(g, opt);
    violations += res.violating_moves;
    moves += res.moves;
    worst = std::min(worst, modularity(g, res.assignment.labels));
  }
  return {violations == 0 && worst >= 0.3,
          format("%zu moves, %zu non-improving, min modularity %.3f", moves, violations, worst)};
}

// ---------------------------------------------------------------- criterion 5

double gaussian(Matrix const &a, std::size_t i, Matrix const &b, std::size_t j, double sigma)
{
  return std::exp(-squared_distance(a.row(i), b.row(j)) / (2.0 * sigma * sigma));
}

double cmmd_oracle(Matrix const &t, Matrix const &s, double sigma)
{
  double tt = 0.0, ts = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < t.rows; ++i)
  {
    for (std::size_t j = 0; j < t.rows; ++j)
    {
      tt += gaussian(t, i, t, j, sigma);
    }
    for (std::size_t j = 0; j < s.rows; ++j)
    {
      ts += gaussian(t, i, s, j, sigma);
    }
  }
  for (std::size_t i = 0; i < s.rows; ++i)
  {
    for (std::size_t j = 0; j < s.rows; ++j)
    {
      ss += gaussian(s, i, s, j, sigma);
    }
  }
  double const nt = static_cast<double>(t.rows), ns = static_cast<double>(s.rows);
  return tt / (nt * nt) - 2.0 * ts / (nt * ns) + ss / (ns * ns);
}

Outcome cmmd_properties()
{
  std::mt19937_64 rng(505);
  ad::Tape        tape(false);
  double          identical = 0.0;
  double          translated = std::numeric_limits<double>::infinity();
  double          worst_gap  = 0.0;
  for (int trial = 0; trial < 50; ++trial)
  {
    std::size_t const nt = 1 + static_cast<std::size_t>(trial) % 20;
    std::size_t const ns = 20 - static_cast<std::size_t>(trial * 7) % 20;
    Matrix const      t  = random_matrix(nt, 5, rng);
    Matrix const      s  = random_matrix(ns, 5, rng, -0.5f, 1.5f);
    double const      sigma = 0.3 + 0.05 * trial;
    worst_gap = std::max(worst_gap, std::abs(cmmd_loss(tape, to_tensor(t), to_tensor(s), sigma).item() -
                                             cmmd_oracle(t, s, sigma)));
    identical = std::max(identical, std::abs(static_cast<double>(cmmd_loss(tape, to_tensor(t), to_tensor(t), sigma).item())));
    Matrix shifted = t;
    for (auto &v : shifted.data)
    {
      v += 25.0f;
    }
    translated = std::min(translated, static_cast<double>(cmmd_loss(tape, to_tensor(t), to_tensor(shifted), sigma).item()));
  }
  return {identical <= 1e-6 && translated > 0.0 && worst_gap <= 1e-6,
          format("identical %.1e, translated min %.3f, oracle gap %.1e", identical, translated, worst_gap)};
}

// ---------------------------------------------------------------- criterion 6

std::vector<double> random_distribution(std::size_t n, std::mt19937_64 &rng)
{
  std::exponential_distribution<double> e(1.0);
  std::vector<double>                   p(n);
  for (auto &x : p)
  {
    x = e(rng) + 1e-12;
  }
  double const z = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto &x : p)
  {
    x /= z;
  }
  return p;
}

Outcome fusion_convexity()
{
  std::mt19937_64                            rng(606);
  std::uniform_int_distribution<std::size_t> pick(0, 19);
  std::vector<NodeId> const                  query{0};
  std::size_t                                nll_violations = 0;
  for (int trial = 0; trial < 1000; ++trial)
  {
    std::vector<std::vector<double>> experts{random_distribution(20, rng), random_distribution(20, rng),
                                             random_distribution(20, rng)};
    auto const        fused = fuse_cs(experts, query, 1);
    std::size_t const y     = pick(rng);
    double            mean  = 0.0;
    for (auto const &p : experts)
    {
      mean -= std::log(p[y]) / 3.0;
    }
    nll_violations += -std::log(fused.scores[y]) > mean + 1e-12 ? 1 : 0;
  }

  Graph const                            pair = make_graph(2, {{0, 1}});
  auto const                             edge = edge_pairs(pair);
  std::uniform_real_distribution<double> sim(0.0, 6.0);
  auto                                   edge_loss = [&](double s) {
    ad::Tape   tape(false);
    float const root = static_cast<float>(std::sqrt(s));
    return static_cast<double>(ocd_loss(tape, ad::Tensor::from_data({2, 1}, {root, root}), edge, PairSample{}, 1e-5f).item());
  };
  std::size_t ocd_violations = 0;
  for (int trial = 0; trial < 200; ++trial)
  {
    double const a = sim(rng), b = sim(rng);
    ocd_violations += edge_loss(0.5 * (a + b)) > 0.5 * (edge_loss(a) + edge_loss(b)) + 1e-5 ? 1 : 0;
  }
  return {nll_violations == 0 && ocd_violations == 0,
          format("NLL violations %zu/1000, OCD edge-term violations %zu/200", nll_violations, ocd_violations)};
}

// ---------------------------------------------------------------- criterion 7

Outcome hungarian_optimal()
{
  std::mt19937_64 rng(707);
  std::size_t     mismatches = 0, total = 0;
  for (std::size_t k = 1; k <= 6; ++k)
  {
    for (int trial = 0; trial < 100; ++trial)
    {
      Matrix const c = random_matrix(k, k, rng, 0.0f, 10.0f);
      auto const   a = hungarian(c);
      double       got = 0.0;
      for (std::size_t i = 0; i < k; ++i)
      {
        got += c(i, a[i]);
      }
      std::vector<std::size_t> perm(k);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      double best = std::numeric_limits<double>::infinity();
      do
      {
        double cost = 0.0;
        for (std::size_t i = 0; i < k; ++i)
        {
          cost += c(i, perm[i]);
        }
        best = std::min(best, cost);
      } while (std::next_permutation(perm.begin(), perm.end()));
      mismatches += std::abs(got - best) <= 1e-9 * std::max(1.0, best) ? 0 : 1;
      ++total;
    }
  }
  return {mismatches == 0, format("%zu/%zu matrices optimal", total - mismatches, total)};
}

// ---------------------------------------------------------- criteria 8 to 11

RunConfig desk_config()
{
  RunConfig cfg;
  cfg.encoder.hidden = 64;
  cfg.encoder.heads  = 4;
  cfg.seed           = 3;
  cfg.threads        = 2;
  return cfg;
}

SbmParams four_blocks(std::uint64_t seed, std::size_t dim)
{
  SbmParams sp;
  sp.blocks      = 4;
  sp.block_size  = 50;
  sp.p_in        = 0.2;
  sp.p_out       = 0.01;
  sp.feature_dim = dim;
  sp.seed        = seed;
  sp.name        = "sbm-" + std::to_string(seed);
  return sp;
}

std::vector<fs::path> pretrain_experts(RunConfig const &cfg, std::vector<SbmParams> const &sources,
                                       fs::path const &root)
{
  std::vector<fs::path> out;
  for (auto const &sp : sources)
  {
    auto const bundle = sbm_generate(sp);
    auto       ckpt   = pretrain(bundle.graph, cfg.ugl_config(), bundle.communities);
    ckpt.source_name  = bundle.name;
    out.push_back(root / ("ckpt-" + bundle.name));
    save_checkpoint(ckpt, out.back());
  }
  return out;
}

struct Stage
{
  RunConfig             config = desk_config();
  std::vector<fs::path> ckpts;
  DatasetBundle         target;
  double                pretrain_seconds = 0.0;
  std::map<std::string, std::string> before;
};

Stage &stage()
{
  static Stage s = [] {
    Stage      st;
    auto const start = Clock::now();
    st.ckpts = pretrain_experts(st.config, {four_blocks(11, 16), four_blocks(12, 20)}, scratch_root());
    st.pretrain_seconds = seconds_since(start);
    for (auto const &c : st.ckpts)
    {
      for (auto const &[name, bytes] : file_bytes(c))
      {
        st.before[(c.filename() / name).generic_string()] = bytes;
      }
    }
    st.target = sbm_generate(four_blocks(21, 24));
    QuerySamplerOptions qo;
    qo.per_community = 5;
    qo.seed          = 7;
    st.target.queries = sample_queries(st.target, qo);
    return st;
  }();
  return s;
}

Outcome end_to_end_dcd()
{
  auto      &st    = stage();
  auto const start = Clock::now();
  auto const res   = detect(st.config, st.ckpts, st.target, 4, false, st.config.threshold);
  double const wall = st.pretrain_seconds + seconds_since(start);
  double const score = nmi(first_labels(res.labels), first_labels(*st.target.labels));
  return {score >= 0.7 && wall <= 300.0, format("fused NMI %.3f over %zu experts, %.1fs", score, st.ckpts.size(), wall)};
}

Outcome end_to_end_cs()
{
  auto               &st = stage();
  QuerySamplerOptions qo;
  qo.per_community = 5;
  qo.seed          = 8;
  auto const tests = sample_queries(st.target, qo);
  auto const res   = search(st.config, st.ckpts, st.target, tests, 50);
  double const f1  = evaluate("f1", res, st.target, tests);
  return {tests.size() == 20 && f1 >= 0.8, format("mean F1 %.3f over %zu queries (r = 50)", f1, tests.size())};
}

// Three-epoch moving average, then least-squares slope and end-versus-start.
struct Trend
{
  double      slope   = 0.0;
  double      start   = 0.0;
  double      end     = 0.0;
  std::size_t upticks = 0;
};

Trend smoothed_trend(std::vector<double> const &loss, std::size_t epochs)
{
  std::vector<double> s;
  for (std::size_t i = 2; i < std::min(epochs, loss.size()); ++i)
  {
    s.push_back((loss[i - 2] + loss[i - 1] + loss[i]) / 3.0);
  }
  Trend t;
  if (s.size() < 2)
  {
    return t;
  }
  double const mx = 0.5 * static_cast<double>(s.size() - 1);
  double const my = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  double       num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
  {
    num += (static_cast<double>(i) - mx) * (s[i] - my);
    den += (static_cast<double>(i) - mx) * (static_cast<double>(i) - mx);
    t.upticks += i > 0 && s[i] > s[i - 1] ? 1 : 0;
  }
  t.slope = num / den;
  t.start = s.front();
  t.end   = s.back();
  return t;
}

Outcome end_to_end_ocd()
{
  RunConfig cfg = desk_config();
  SbmParams tp;
  tp.blocks      = 2;
  tp.block_size  = 75;
  tp.p_in        = 0.3;
  tp.p_out       = 0.01;
  tp.feature_dim = 24;
  tp.overlap     = 0.2;
  tp.seed        = 2;
  auto const target = sbm_generate(tp);
  auto const ckpts  = pretrain_experts(cfg, {four_blocks(1, 16)}, scratch_root() / "ocd");

  std::vector<Matrix> ys;
  std::string         trend_text;
  bool                decreasing = true;
  for (auto const &path : ckpts)
  {
    auto const ckpt = load_checkpoint(path);
    auto const data = preprocess_target(target.graph, ckpt, 2);
    auto       das  = cfg.das_config(Task::ocd, 2);
    auto const res  = das_train(target.graph, data.tokens, ckpt, {}, das);
    ys.push_back(res.output.affiliation);
    auto const t = smoothed_trend(res.task_loss, 50);
    decreasing   = decreasing && res.task_loss.size() >= 50 && t.slope < 0.0 && t.end < t.start;
    trend_text += format("loss %.3f->%.3f over %zu epochs, slope %.2e, %zu small upticks", t.start, t.end,
                         std::min<std::size_t>(50, res.task_loss.size()), t.slope, t.upticks);
  }
  auto const   fused = fuse_ocd(ys, cfg.threshold);
  double const score = onmi(fused.memberships, *target.labels);
  return {score >= 0.3 && decreasing, format("ONMI %.3f; ", score) + trend_text};
}

Outcome frozen_backbone()
{
  auto &st = stage();
  auto  reports = adapt_experts(st.config, Task::cs, st.ckpts, st.target, 0);
  std::map<std::string, std::string> after;
  for (auto const &c : st.ckpts)
  {
    for (auto const &[name, bytes] : file_bytes(c, "adapter"))
    {
      after[(c.filename() / name).generic_string()] = bytes;
    }
  }
  bool const identical = after == st.before && !after.empty();

  // Parameter budget at the default configuration on this target.
  RunConfig const defaults;
  auto const      data = preprocess(st.target.graph, defaults.preprocess_config(), 4);
  EncoderConfig   enc  = defaults.encoder;
  enc.input_dim        = data.tokens.width;
  std::size_t const backbone = EncoderParams::init(enc, 0).parameter_count();
  double            worst    = 0.0;
  for (Task task : {Task::cs, Task::dcd, Task::ocd})
  {
    auto adapter = Adapter::init(task, data.tokens.width, enc.input_dim, defaults.adapt.n_prompts, 0);
    if (task == Task::ocd)
    {
      adapter.decoder = OcdDecoder::init(2 * enc.hidden, defaults.adapt.decoder_hidden, 4, 0);
    }
    worst = std::max(worst, static_cast<double>(adapter.parameter_count()) / static_cast<double>(backbone));
  }
  return {identical && worst < 0.05 && !reports.empty(),
          format("%zu checkpoint files byte-identical: %s; adapter/backbone at defaults %.2f%% (backbone %zu)",
                 after.size(), identical ? "yes" : "no", 100.0 * worst, backbone)};
}

// --------------------------------------------------------------- criterion 12

double median_preprocess_seconds(std::size_t n)
{
  SbmParams sp;
  sp.blocks      = 10;
  sp.block_size  = n / 10;
  double const degree = 4.0;
  sp.p_in        = 0.8 * degree / static_cast<double>(sp.block_size - 1);
  sp.p_out       = 0.2 * degree / static_cast<double>(n - sp.block_size);
  sp.feature_dim = 16;
  sp.seed        = 12;
  auto const bundle = sbm_generate(sp);
  std::vector<double> times;
  for (int rep = 0; rep < 3; ++rep)
  {
    auto const start = Clock::now();
    auto const out   = preprocess(bundle.graph, PreprocessConfig{}, bundle.communities);
    times.push_back(seconds_since(start));
  }
  std::sort(times.begin(), times.end());
  return times[1];
}

Outcome preprocess_scaling()
{
  double const small = median_preprocess_seconds(1000);
  double const large = median_preprocess_seconds(10000);
  double const ratio = large / small;
  return {ratio <= 15.0, format("n=1000 %.3fs, n=10000 %.3fs, ratio %.1fx (mean degree 4)", small, large, ratio)};
}

// --------------------------------------------------------------- criterion 13

std::map<std::string, std::string> full_pipeline(fs::path const &dir)
{
  RunConfig cfg      = desk_config();
  cfg.encoder.hidden = 32;
  auto const ckpts   = pretrain_experts(cfg, {four_blocks(31, 12), four_blocks(32, 10)}, dir);
  auto       target  = sbm_generate(four_blocks(33, 14));
  QuerySamplerOptions qo;
  qo.per_community = 3;
  qo.seed          = cfg.seed;
  target.queries   = sample_queries(target, qo);
  save_bundle(target, dir / "target");
  auto const loaded = load_bundle(dir / "target");
  save_result(detect(cfg, ckpts, loaded, 4, false, cfg.threshold), dir / "dcd.tsv");
  save_result(search(cfg, ckpts, loaded, loaded.queries, 50), dir / "cs.tsv");
  return file_bytes(dir);
}

Outcome reproducibility()
{
  auto const a = full_pipeline(scratch_root() / "run-a");
  auto const b = full_pipeline(scratch_root() / "run-b");
  std::size_t differing = 0;
  for (auto const &[name, bytes] : a)
  {
    auto const it = b.find(name);
    differing += it == b.end() || it->second != bytes ? 1 : 0;
  }
  bool const same = differing == 0 && a.size() == b.size() && a.count("dcd.tsv") && a.count("cs.tsv");
  return {same, format("%zu files compared, %zu differ", a.size(), differing)};
}

}  // namespace

int main()
{
  struct Criterion
  {
    int                     id;
    char const             *name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> const criteria{
      {1, "gradient checks for every loss and the encoder", gradient_suite},
      {2, "conductance against rational brute force", conductance_agreement},
      {3, "hop selection against exhaustive recomputation", hop_selection},
      {4, "louvain strict improvement and planted modularity", louvain_moves},
      {5, "cmmd identities and kernel-sum oracle", cmmd_properties},
      {6, "averaged experts never worsen the likelihood", fusion_convexity},
      {7, "hungarian against brute-force permutations", hungarian_optimal},
      {8, "end-to-end disjoint detection", end_to_end_dcd},
      {9, "end-to-end community search", end_to_end_cs},
      {10, "end-to-end overlapping detection", end_to_end_ocd},
      {11, "frozen backbone and adapter budget", frozen_backbone},
      {12, "preprocess scaling from 1k to 10k nodes", preprocess_scaling},
      {13, "bitwise reproducible pipeline", reproducibility},
  };
  set_warning_sink([](std::string const &) {});
  int failed = 0;
  for (auto const &c : criteria)
  {
    Outcome out;
    auto const start = Clock::now();
    try
    {
      out = c.run();
    }
    catch (std::exception const &e)
    {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s [%2d] %s: %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(),
                seconds_since(start));
    std::fflush(stdout);
    failed += out.pass ? 0 : 1;
  }
  fs::remove_all(scratch_root());
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
