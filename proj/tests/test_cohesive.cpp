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

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "graphs.hpp"
#include "unicom/cohesive.hpp"
#include "unicom/error.hpp"

using namespace unicom;
using namespace unicom::testing;

namespace {

double partition_inertia(Matrix const &x, std::vector<std::size_t> const &labels, std::size_t k)
{
  Matrix                   mean(k, x.cols);
  std::vector<std::size_t> count(k);
  for (std::size_t i = 0; i < x.rows; ++i)
  {
    ++count[labels[i]];
    for (std::size_t j = 0; j < x.cols; ++j)
    {
      mean(labels[i], j) += x(i, j);
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i)
  {
    for (std::size_t j = 0; j < x.cols; ++j)
    {
      double const m = mean(labels[i], j) / static_cast<double>(count[labels[i]]);
      total += (x(i, j) - m) * (x(i, j) - m);
    }
  }
  return total;
}

double best_two_partition(Matrix const &x)
{
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t bits = 1; bits + 1 < (1u << x.rows); ++bits)
  {
    std::vector<std::size_t> labels(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i)
    {
      labels[i] = (bits >> i) & 1u;
    }
    best = std::min(best, partition_inertia(x, labels, 2));
  }
  return best;
}

double modularity_oracle(Graph const &g, std::vector<std::size_t> const &labels)
{
  double const two_m = 2.0 * static_cast<double>(g.num_edges());
  double       q     = 0.0;
  for (NodeId i = 0; i < g.num_nodes(); ++i)
  {
    for (NodeId j = 0; j < g.num_nodes(); ++j)
    {
      if (labels[i] != labels[j])
      {
        continue;
      }
      double const a = g.has_edge(i, j) ? 1.0 : 0.0;
      q += a - static_cast<double>(g.degree(i) * g.degree(j)) / two_m;
    }
  }
  return q / two_m;
}

// Enumerates set partitions as restricted growth strings.
void enumerate_partitions(std::vector<std::size_t> &labels, std::size_t pos, std::size_t used,
                          Graph const &g, double &best, std::vector<std::size_t> &best_labels)
{
  if (pos == labels.size())
  {
    double const q = modularity_oracle(g, labels);
    if (q > best + 1e-12)
    {
      best        = q;
      best_labels = labels;
    }
    return;
  }
  for (std::size_t c = 0; c <= used; ++c)
  {
    labels[pos] = c;
    enumerate_partitions(labels, pos + 1, std::max(used, c + 1), g, best, best_labels);
  }
}

bool same_partition(std::vector<std::size_t> const &a, std::vector<std::size_t> const &b)
{
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    for (std::size_t j = 0; j < a.size(); ++j)
    {
      if ((a[i] == a[j]) != (b[i] == b[j]))
      {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST_CASE("k-means")
{
  std::mt19937_64 rng(1);

  SUBCASE("one cluster is the column mean")
  {
    auto x = random_matrix(9, 3, rng);
    auto a = kmeans(x, 1);
    CHECK(a.k == 1);
    for (auto l : a.labels)
    {
      CHECK(l == 0);
    }
    for (std::size_t j = 0; j < 3; ++j)
    {
      double mu = 0.0;
      for (std::size_t i = 0; i < 9; ++i)
      {
        mu += x(i, j);
      }
      CHECK(a.centroids(0, j) == doctest::Approx(mu / 9.0));
    }
  }
  SUBCASE("one cluster per point")
  {
    auto x = random_matrix(7, 2, rng);
    auto a = kmeans(x, 7);
    CHECK(kmeans_inertia(x, a) == doctest::Approx(0.0));
    CHECK(std::set<std::size_t>(a.labels.begin(), a.labels.end()).size() == 7);
  }
  SUBCASE("invalid counts")
  {
    auto x = random_matrix(4, 2, rng);
    CHECK_THROWS_AS(kmeans(x, 5), InvalidArgument);
    CHECK_THROWS_AS(kmeans(x, 0), InvalidArgument);
  }
  SUBCASE("separated clouds reach the optimal two-partition")
  {
    for (int trial = 0; trial < 10; ++trial)
    {
      std::size_t const n = 6 + trial % 5;
      Matrix            x = random_matrix(n, 2, rng, -0.5f, 0.5f);
      for (std::size_t i = 0; i < n / 2; ++i)
      {
        x(i, 0) += 10.0f;
      }
      KMeansOptions opt;
      opt.seed     = static_cast<std::uint64_t>(trial);
      opt.restarts = 3;
      auto a       = kmeans(x, 2, opt);
      CHECK(kmeans_inertia(x, a) == doctest::Approx(best_two_partition(x)).epsilon(1e-5));
      for (std::size_t i = 0; i < n; ++i)
      {
        CHECK((a.labels[i] == a.labels[0]) == (i < n / 2));
      }
    }
  }
  SUBCASE("inertia history is non-increasing and runs are reproducible")
  {
    auto          x = random_matrix(200, 4, rng);
    KMeansOptions opt;
    opt.seed = 42;
    auto a   = kmeans(x, 6, opt);
    auto b   = kmeans(x, 6, opt);
    CHECK(a.labels == b.labels);
    CHECK(a.centroids == b.centroids);
    REQUIRE(!a.history.empty());
    for (std::size_t i = 1; i < a.history.size(); ++i)
    {
      CHECK(a.history[i] <= a.history[i - 1] + 1e-9 * std::abs(a.history[i - 1]));
    }
    std::set<std::size_t> used(a.labels.begin(), a.labels.end());
    CHECK(used.size() == 6);
  }
  SUBCASE("duplicate points still fill every cluster")
  {
    Matrix x(8, 2, 1.0f);
    x(7, 0) = 5.0f;
    auto a  = kmeans(x, 3);
    for (auto l : a.labels)
    {
      CHECK(l < 3);
    }
  }
}

TEST_CASE("louvain")
{
  SUBCASE("two triangles joined by a bridge")
  {
    auto g = make_graph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}});
    LouvainOptions opt;
    opt.verify_moves = true;
    auto r           = louvain(g, opt);
    std::vector<std::size_t> labels(6);
    std::vector<std::size_t> best_labels;
    double                   best = -1.0;
    enumerate_partitions(labels, 0, 0, g, best, best_labels);
    CHECK(same_partition(r.assignment.labels, best_labels));
    CHECK(r.modularity == doctest::Approx(best));
    CHECK(r.modularity == doctest::Approx(modularity_oracle(g, r.assignment.labels)));
    CHECK(r.violating_moves == 0);
  }
  SUBCASE("complete graph stays whole")
  {
    std::vector<Edge> edges;
    for (NodeId u = 0; u < 7; ++u)
    {
      for (NodeId v = u + 1; v < 7; ++v)
      {
        edges.push_back({u, v});
      }
    }
    auto r = louvain(make_graph(7, edges));
    CHECK(r.assignment.k == 1);
  }
  SUBCASE("edgeless graph gives singletons")
  {
    auto r = louvain(make_graph(4, {}));
    CHECK(r.assignment.k == 4);
  }
  SUBCASE("small random graphs reach the brute-force optimum or close to it")
  {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 6; ++trial)
    {
      auto g = erdos_renyi(8, 0.35, rng);
      if (g.num_edges() == 0)
      {
        continue;
      }
      LouvainOptions opt;
      opt.verify_moves = true;
      auto                     r = louvain(g, opt);
      std::vector<std::size_t> labels(8);
      std::vector<std::size_t> best_labels;
      double                   best = -1.0;
      enumerate_partitions(labels, 0, 0, g, best, best_labels);
      CHECK(r.violating_moves == 0);
      CHECK(r.modularity <= best + 1e-9);
      CHECK(r.modularity == doctest::Approx(modularity_oracle(g, r.assignment.labels)));
      CHECK(r.modularity >= 0.8 * best);
    }
  }
  SUBCASE("planted partition modularity over ten seeds")
  {
    for (std::uint64_t seed = 0; seed < 10; ++seed)
    {
      std::mt19937_64 rng(seed);
      auto            g = planted_partition(60, 2, 0.5, 0.02, rng);
      LouvainOptions  opt;
      opt.verify_moves = seed < 2;
      auto r           = louvain(g, opt);
      CHECK(r.modularity >= 0.3);
      CHECK(r.violating_moves == 0);
      for (std::size_t i = 1; i < r.assignment.history.size(); ++i)
      {
        CHECK(r.assignment.history[i] >= r.assignment.history[i - 1] - 1e-12);
      }
      auto again = louvain(g, opt);
      CHECK(again.assignment.labels == r.assignment.labels);
    }
  }
}

TEST_CASE("cluster-mean prompts")
{
  SUBCASE("hand mean")
  {
    Matrix            x(3, 2, std::vector<float>{1, 0, 0, 1, 1, 1});
    ClusterAssignment a;
    a.labels = {0, 0, 0};
    a.k      = 1;
    auto p   = feature_prompt(x, a);
    for (std::size_t i = 0; i < 3; ++i)
    {
      CHECK(p(i, 0) == doctest::Approx(2.0 / 3.0));
      CHECK(p(i, 1) == doctest::Approx(2.0 / 3.0));
    }
  }
  SUBCASE("singletons reproduce the features")
  {
    std::mt19937_64   rng(3);
    auto              x = random_matrix(5, 3, rng);
    ClusterAssignment a;
    a.labels = {0, 1, 2, 3, 4};
    a.k      = 5;
    CHECK(structure_prompt(x, a) == x);
  }
  SUBCASE("rows are bitwise equal inside a cluster")
  {
    std::mt19937_64 rng(4);
    auto            x = random_matrix(50, 4, rng);
    auto            a = kmeans(x, 5);
    auto            p = feature_prompt(x, a);
    for (std::size_t i = 0; i < 50; ++i)
    {
      for (std::size_t j = 0; j < 50; ++j)
      {
        if (a.labels[i] == a.labels[j])
        {
          CHECK(std::equal(p.row(i).begin(), p.row(i).end(), p.row(j).begin()));
        }
      }
    }
    CHECK(feature_prompt(x, a) == structure_prompt(x, a));
  }
}

TEST_CASE("cohesive token assembly")
{
  std::mt19937_64 rng(5);
  auto            g     = erdos_renyi(15, 0.2, rng, 3);
  auto            stack = propagate(g, 2);
  auto            aug   = build_aug_tokens(stack, select_local_hops(g, 2));
  PromptPair      p{random_matrix(15, 3, rng), random_matrix(15, 3, rng)};
  auto            tok = assemble_cohesive_tokens(aug, p);
  CHECK(tok.tokens == 5);
  for (NodeId v = 0; v < 15; ++v)
  {
    CHECK(tok.valid(v, 3));
    CHECK(tok.valid(v, 4));
    for (std::size_t t = 0; t <= 2; ++t)
    {
      CHECK(tok.valid(v, t) == aug.valid(v, t));
      CHECK(std::equal(tok.token(v, t).begin(), tok.token(v, t).end(), aug.token(v, t).begin()));
    }
    CHECK(std::equal(tok.token(v, 3).begin(), tok.token(v, 3).end(), p.feat.row(v).begin()));
    CHECK(std::equal(tok.token(v, 4).begin(), tok.token(v, 4).end(), p.strc.row(v).begin()));
  }
  PromptPair bad{Matrix(15, 2), Matrix(15, 3)};
  CHECK_THROWS_AS(assemble_cohesive_tokens(aug, bad), InvalidArgument);
}
