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

#include "unicom/cohesive.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <random>
#include <string>

#include "unicom/error.hpp"

namespace unicom {

// ---- K-means --------------------------------------------------------------

namespace {

constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

Matrix seed_plus_plus(Matrix const &x, std::size_t k, std::mt19937_64 &rng)
{
  std::size_t const n = x.rows;
  Matrix            centroids(k, x.cols);
  std::vector<std::uint8_t> taken(n, 0);
  std::vector<double>       d2(n, std::numeric_limits<double>::infinity());

  std::size_t first = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  auto        place = [&](std::size_t c, std::size_t idx) {
    taken[idx] = 1;
    std::copy(x.row(idx).begin(), x.row(idx).end(), centroids.row(c).begin());
    for (std::size_t i = 0; i < n; ++i)
    {
      d2[i] = std::min(d2[i], squared_distance(x.row(i), centroids.row(c)));
    }
  };
  place(0, first);
  for (std::size_t c = 1; c < k; ++c)
  {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
      total += taken[i] ? 0.0 : d2[i];
    }
    std::size_t pick = kUnassigned;
    if (total > 0.0)
    {
      double target = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (std::size_t i = 0; i < n; ++i)
      {
        if (taken[i] || d2[i] == 0.0)
        {
          continue;
        }
        pick = i;
        target -= d2[i];
        if (target < 0.0)
        {
          break;
        }
      }
    }
    if (pick == kUnassigned)
    {
      // Every remaining point duplicates a centroid; take any unused one.
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n; ++i)
      {
        if (!taken[i])
        {
          free.push_back(i);
        }
      }
      pick = free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
    }
    place(c, pick);
  }
  return centroids;
}

ClusterAssignment lloyd(Matrix const &x, Matrix centroids, std::size_t max_iters)
{
  std::size_t const n = x.rows;
  std::size_t const k = centroids.rows;
  ClusterAssignment out;
  out.k = k;
  out.labels.assign(n, kUnassigned);
  std::vector<double> dist(n);

  for (std::size_t iter = 0; iter < max_iters; ++iter)
  {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i)
    {
      std::size_t best   = out.labels[i];
      double      best_d = best == kUnassigned ? std::numeric_limits<double>::infinity()
                                               : squared_distance(x.row(i), centroids.row(best));
      for (std::size_t c = 0; c < k; ++c)
      {
        double const d = squared_distance(x.row(i), centroids.row(c));
        if (d < best_d)
        {
          best_d = d;
          best   = c;
        }
      }
      changed = changed || best != out.labels[i];
      out.labels[i] = best;
      dist[i]       = best_d;
    }

    std::vector<std::size_t> counts(k, 0);
    for (std::size_t l : out.labels)
    {
      ++counts[l];
    }
    for (std::size_t c = 0; c < k; ++c)
    {
      if (counts[c] != 0)
      {
        continue;
      }
      // Reseed at the point farthest from its own centroid, taken from a
      // cluster that can spare it.
      std::size_t far = kUnassigned;
      for (std::size_t i = 0; i < n; ++i)
      {
        if (counts[out.labels[i]] > 1 && (far == kUnassigned || dist[i] > dist[far]))
        {
          far = i;
        }
      }
      if (far == kUnassigned)
      {
        break;
      }
      --counts[out.labels[far]];
      out.labels[far] = c;
      counts[c]       = 1;
      dist[far]       = 0.0;
      changed         = true;
    }

    std::vector<double> acc(k * x.cols, 0.0);
    for (std::size_t i = 0; i < n; ++i)
    {
      for (std::size_t j = 0; j < x.cols; ++j)
      {
        acc[out.labels[i] * x.cols + j] += x(i, j);
      }
    }
    for (std::size_t c = 0; c < k; ++c)
    {
      if (counts[c] == 0)
      {
        continue;
      }
      for (std::size_t j = 0; j < x.cols; ++j)
      {
        centroids(c, j) = static_cast<float>(acc[c * x.cols + j] / static_cast<double>(counts[c]));
      }
    }
    out.centroids = centroids;
    out.history.push_back(kmeans_inertia(x, out));
    if (!changed)
    {
      break;
    }
  }
  out.centroids = std::move(centroids);
  return out;
}

}  // namespace

double kmeans_inertia(Matrix const &x, ClusterAssignment const &a)
{
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i)
  {
    total += squared_distance(x.row(i), a.centroids.row(a.labels[i]));
  }
  return total;
}

ClusterAssignment kmeans(Matrix const &x, std::size_t k, KMeansOptions const &options)
{
  if (k == 0 || k > x.rows)
  {
    throw InvalidArgument("kmeans: k = " + std::to_string(k) + " must lie in [1, " +
                          std::to_string(x.rows) + "]");
  }
  std::mt19937_64   rng(options.seed);
  ClusterAssignment best;
  double            best_inertia = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(1, options.restarts); ++r)
  {
    auto run = lloyd(x, seed_plus_plus(x, k, rng), std::max<std::size_t>(1, options.max_iters));
    double const inertia = run.history.back();
    if (inertia < best_inertia)
    {
      best_inertia = inertia;
      best         = std::move(run);
    }
  }
  return best;
}

// ---- Louvain --------------------------------------------------------------

namespace {

// Aggregated weighted graph. adj[i] holds (j, A'_ij) for j != i; loop[i] = A'_ii,
// which counts each internal edge twice.
struct WeightedGraph
{
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;
  std::vector<double>                                      loop;
  std::vector<double>                                      strength;
  double                                                   total = 0.0;  // 2m

  std::size_t size() const
  {
    return adj.size();
  }
};

WeightedGraph from_graph(Graph const &g)
{
  WeightedGraph w;
  w.adj.resize(g.num_nodes());
  w.loop.assign(g.num_nodes(), 0.0);
  w.strength.assign(g.num_nodes(), 0.0);
  for (NodeId v = 0; v < g.num_nodes(); ++v)
  {
    for (NodeId u : g.neighbors(v))
    {
      w.adj[v].emplace_back(u, 1.0);
    }
    w.strength[v] = static_cast<double>(g.degree(v));
    w.total += w.strength[v];
  }
  return w;
}

double weighted_modularity(WeightedGraph const &w, std::vector<std::size_t> const &comm)
{
  if (w.total == 0.0)
  {
    return 0.0;
  }
  std::size_t const   k = *std::max_element(comm.begin(), comm.end()) + 1;
  std::vector<double> in(k, 0.0);
  std::vector<double> tot(k, 0.0);
  for (std::size_t i = 0; i < w.size(); ++i)
  {
    tot[comm[i]] += w.strength[i];
    in[comm[i]] += w.loop[i];
    for (auto const &[j, a] : w.adj[i])
    {
      if (comm[j] == comm[i])
      {
        in[comm[i]] += a;
      }
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < k; ++c)
  {
    q += in[c] / w.total - (tot[c] / w.total) * (tot[c] / w.total);
  }
  return q;
}

// One pass of local moves until no node improves. Returns the number of moves.
std::size_t local_moves(WeightedGraph const &w, std::vector<std::size_t> &comm,
                        LouvainOptions const &options, std::size_t &violations)
{
  std::size_t const   n = w.size();
  double const        m = w.total / 2.0;
  std::vector<double> tot(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
  {
    tot[comm[i]] += w.strength[i];
  }
  std::vector<double>      link(n, 0.0);
  std::vector<std::size_t> touched;
  std::size_t              moves = 0;
  bool                     improved = true;
  while (improved)
  {
    improved = false;
    for (std::size_t i = 0; i < n; ++i)
    {
      std::size_t const own = comm[i];
      double const      ki  = w.strength[i];
      touched.clear();
      for (auto const &[j, a] : w.adj[i])
      {
        if (link[comm[j]] == 0.0)
        {
          touched.push_back(comm[j]);
        }
        link[comm[j]] += a;
      }
      tot[own] -= ki;
      auto gain = [&](std::size_t c) { return link[c] / m - tot[c] * ki / (2.0 * m * m); };

      double const stay      = gain(own);
      std::size_t  best      = own;
      double       best_gain = stay;
      std::sort(touched.begin(), touched.end());
      for (std::size_t c : touched)
      {
        double const g = gain(c);
        if (g > best_gain)
        {
          best_gain = g;
          best      = c;
        }
      }
      if (best != own && best_gain - stay > options.min_gain)
      {
        double before = 0.0;
        if (options.verify_moves)
        {
          before = weighted_modularity(w, comm);
        }
        comm[i] = best;
        ++moves;
        improved = true;
        if (options.verify_moves && !(weighted_modularity(w, comm) > before))
        {
          ++violations;
        }
      }
      tot[comm[i]] += ki;
      for (std::size_t c : touched)
      {
        link[c] = 0.0;
      }
    }
  }
  return moves;
}

// Dense relabelling in order of first appearance.
std::size_t compact(std::vector<std::size_t> &comm)
{
  std::vector<std::size_t> remap(comm.size(), kUnassigned);
  std::size_t              next = 0;
  for (auto &c : comm)
  {
    if (remap[c] == kUnassigned)
    {
      remap[c] = next++;
    }
    c = remap[c];
  }
  return next;
}

WeightedGraph aggregate(WeightedGraph const &w, std::vector<std::size_t> const &comm, std::size_t k)
{
  WeightedGraph out;
  out.adj.resize(k);
  out.loop.assign(k, 0.0);
  out.strength.assign(k, 0.0);
  out.total = w.total;
  std::vector<std::map<std::size_t, double>> links(k);
  for (std::size_t i = 0; i < w.size(); ++i)
  {
    std::size_t const ci = comm[i];
    out.strength[ci] += w.strength[i];
    out.loop[ci] += w.loop[i];
    for (auto const &[j, a] : w.adj[i])
    {
      if (comm[j] == ci)
      {
        out.loop[ci] += a;
      }
      else
      {
        links[ci][comm[j]] += a;
      }
    }
  }
  for (std::size_t c = 0; c < k; ++c)
  {
    out.adj[c].assign(links[c].begin(), links[c].end());
  }
  return out;
}

}  // namespace

LouvainResult louvain(Graph const &g, LouvainOptions const &options)
{
  LouvainResult result;
  std::size_t const n = g.num_nodes();
  std::vector<std::size_t> node_comm(n);
  for (std::size_t v = 0; v < n; ++v)
  {
    node_comm[v] = v;
  }
  WeightedGraph w = from_graph(g);
  if (n == 0)
  {
    return result;
  }
  result.assignment.history.push_back(weighted_modularity(w, node_comm));

  for (std::size_t level = 0; level < options.max_levels && w.total > 0.0; ++level)
  {
    std::vector<std::size_t> comm(w.size());
    for (std::size_t i = 0; i < comm.size(); ++i)
    {
      comm[i] = i;
    }
    std::size_t const moves = local_moves(w, comm, options, result.violating_moves);
    result.moves += moves;
    if (moves == 0)
    {
      break;
    }
    std::size_t const k = compact(comm);
    for (auto &c : node_comm)
    {
      c = comm[c];
    }
    w = aggregate(w, comm, k);
    std::vector<std::size_t> identity(k);
    for (std::size_t i = 0; i < k; ++i)
    {
      identity[i] = i;
    }
    result.assignment.history.push_back(weighted_modularity(w, identity));
  }
  result.assignment.k      = compact(node_comm);
  result.assignment.labels = std::move(node_comm);
  result.modularity        = result.assignment.history.back();
  return result;
}

// ---- prompts --------------------------------------------------------------

Matrix cluster_mean_prompt(Matrix const &x, ClusterAssignment const &a)
{
  if (a.labels.size() != x.rows)
  {
    throw InvalidArgument("cluster_mean_prompt: labels do not cover all rows");
  }
  std::vector<double>      acc(a.k * x.cols, 0.0);
  std::vector<std::size_t> counts(a.k, 0);
  for (std::size_t i = 0; i < x.rows; ++i)
  {
    if (a.labels[i] >= a.k)
    {
      throw InvalidArgument("cluster_mean_prompt: label out of range");
    }
    ++counts[a.labels[i]];
    for (std::size_t j = 0; j < x.cols; ++j)
    {
      acc[a.labels[i] * x.cols + j] += x(i, j);
    }
  }
  Matrix means(a.k, x.cols);
  for (std::size_t c = 0; c < a.k; ++c)
  {
    for (std::size_t j = 0; j < x.cols && counts[c] > 0; ++j)
    {
      means(c, j) = static_cast<float>(acc[c * x.cols + j] / static_cast<double>(counts[c]));
    }
  }
  Matrix out(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
  {
    std::copy(means.row(a.labels[i]).begin(), means.row(a.labels[i]).end(), out.row(i).begin());
  }
  return out;
}

TokenTensor assemble_cohesive_tokens(TokenTensor aug, PromptPair const &prompts)
{
  for (Matrix const *p : {&prompts.feat, &prompts.strc})
  {
    if (p->rows != aug.nodes || p->cols != aug.width)
    {
      throw InvalidArgument("assemble_cohesive_tokens: prompt is " + std::to_string(p->rows) +
                            "x" + std::to_string(p->cols) + ", tokens expect " +
                            std::to_string(aug.nodes) + "x" + std::to_string(aug.width));
    }
  }
  std::size_t const feat_slot = aug.tokens - 2;
  std::size_t const strc_slot = aug.tokens - 1;
  for (std::size_t v = 0; v < aug.nodes; ++v)
  {
    std::copy(prompts.feat.row(v).begin(), prompts.feat.row(v).end(), aug.token(v, feat_slot).begin());
    std::copy(prompts.strc.row(v).begin(), prompts.strc.row(v).end(), aug.token(v, strc_slot).begin());
    aug.mask[v * aug.tokens + feat_slot] = 1;
    aug.mask[v * aug.tokens + strc_slot] = 1;
  }
  return aug;
}

}  // namespace unicom
