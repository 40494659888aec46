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

#include "unicom/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "unicom/error.hpp"

namespace unicom {

namespace {

std::size_t intersection_size(std::span<NodeId const> a, std::span<NodeId const> b)
{
  std::set<NodeId> const sa(a.begin(), a.end());
  std::set<NodeId> const sb(b.begin(), b.end());
  std::size_t            common = 0;
  for (NodeId v : sa)
  {
    common += sb.count(v);
  }
  return common;
}

std::size_t distinct(std::span<NodeId const> a)
{
  return std::set<NodeId>(a.begin(), a.end()).size();
}

std::size_t sorted_intersection(std::vector<NodeId> const &a, std::vector<NodeId> const &b)
{
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size())
  {
    if (a[i] < b[j])
    {
      ++i;
    }
    else if (b[j] < a[i])
    {
      ++j;
    }
    else
    {
      ++common;
      ++i;
      ++j;
    }
  }
  return common;
}

double plogp(double p)
{
  return p > 0.0 ? -p * std::log(p) : 0.0;
}

std::vector<std::size_t> dense_ids(std::span<std::size_t const> labels)
{
  std::map<std::size_t, std::size_t> remap;
  std::vector<std::size_t>           out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
  {
    auto it = remap.emplace(labels[i], remap.size()).first;
    out[i]  = it->second;
  }
  return out;
}

double entropy(std::vector<std::size_t> const &counts, double n)
{
  double h = 0.0;
  for (auto c : counts)
  {
    h += plogp(static_cast<double>(c) / n);
  }
  return h;
}

// Normalised conditional entropy H(X|Y) of the LFK definition.
double conditional_cover_entropy(std::vector<std::vector<NodeId>> const &x,
                                 std::vector<std::vector<NodeId>> const &y, std::size_t n)
{
  double const dn    = static_cast<double>(n);
  double       total = 0.0;
  std::size_t  terms = 0;
  for (auto const &xk : x)
  {
    ++terms;
    double const px = static_cast<double>(xk.size()) / dn;
    double const hx = plogp(px) + plogp(1.0 - px);
    if (hx <= 0.0)
    {
      continue;
    }
    double best = hx;
    for (auto const &yl : y)
    {
      std::size_t const both = sorted_intersection(xk, yl);
      double const      p11  = static_cast<double>(both) / dn;
      double const      p10  = static_cast<double>(xk.size() - both) / dn;
      double const      p01  = static_cast<double>(yl.size() - both) / dn;
      double const      p00  = static_cast<double>(n + both - xk.size() - yl.size()) / dn;
      if (plogp(p11) + plogp(p00) <= plogp(p01) + plogp(p10))
      {
        continue;
      }
      double const py   = static_cast<double>(yl.size()) / dn;
      double const hy   = plogp(py) + plogp(1.0 - py);
      double const hxy  = plogp(p11) + plogp(p10) + plogp(p01) + plogp(p00);
      best              = std::min(best, hxy - hy);
    }
    total += best / hx;
  }
  return terms == 0 ? 0.0 : total / static_cast<double>(terms);
}

}  // namespace

double set_f1(std::span<NodeId const> pred, std::span<NodeId const> truth)
{
  std::size_t const p = distinct(pred);
  std::size_t const t = distinct(truth);
  if (p + t == 0)
  {
    return 1.0;
  }
  return 2.0 * static_cast<double>(intersection_size(pred, truth)) / static_cast<double>(p + t);
}

double set_jaccard(std::span<NodeId const> pred, std::span<NodeId const> truth)
{
  std::size_t const common = intersection_size(pred, truth);
  std::size_t const uni    = distinct(pred) + distinct(truth) - common;
  return uni == 0 ? 1.0 : static_cast<double>(common) / static_cast<double>(uni);
}

double nmi(std::span<std::size_t const> a, std::span<std::size_t const> b)
{
  if (a.size() != b.size())
  {
    throw InvalidArgument("nmi: label vectors differ in length");
  }
  if (a.empty())
  {
    return 0.0;
  }
  auto const  la = dense_ids(a);
  auto const  lb = dense_ids(b);
  std::size_t ka = *std::max_element(la.begin(), la.end()) + 1;
  std::size_t kb = *std::max_element(lb.begin(), lb.end()) + 1;
  std::vector<std::size_t> ca(ka), cb(kb), joint(ka * kb);
  for (std::size_t i = 0; i < la.size(); ++i)
  {
    ++ca[la[i]];
    ++cb[lb[i]];
    ++joint[la[i] * kb + lb[i]];
  }
  double const n  = static_cast<double>(a.size());
  double const ha = entropy(ca, n);
  double const hb = entropy(cb, n);
  if (ha <= 0.0 || hb <= 0.0)
  {
    return 0.0;
  }
  double mi = 0.0;
  for (std::size_t i = 0; i < ka; ++i)
  {
    for (std::size_t j = 0; j < kb; ++j)
    {
      if (joint[i * kb + j] == 0)
      {
        continue;
      }
      double const pij = static_cast<double>(joint[i * kb + j]) / n;
      mi += pij * std::log(pij * n * n / (static_cast<double>(ca[i]) * static_cast<double>(cb[j])));
    }
  }
  return std::clamp(2.0 * mi / (ha + hb), 0.0, 1.0);
}

double membership_nmi(std::span<NodeId const> pred, std::span<NodeId const> truth, std::size_t n)
{
  std::vector<std::size_t> a(n), b(n);
  for (NodeId v : pred)
  {
    a.at(v) = 1;
  }
  for (NodeId v : truth)
  {
    b.at(v) = 1;
  }
  return nmi(a, b);
}

std::vector<std::vector<NodeId>> communities_of(LabelSet const &y)
{
  std::vector<std::vector<NodeId>> out;
  for (NodeId v = 0; v < y.size(); ++v)
  {
    for (auto c : y[v])
    {
      if (c >= out.size())
      {
        out.resize(c + 1);
      }
      if (out[c].empty() || out[c].back() != v)
      {
        out[c].push_back(v);
      }
    }
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](auto const &c) { return c.empty(); }),
            out.end());
  return out;
}

LabelSet labels_from_partition(std::span<std::size_t const> labels)
{
  LabelSet out(labels.size());
  for (std::size_t v = 0; v < labels.size(); ++v)
  {
    out[v] = {static_cast<std::uint32_t>(labels[v])};
  }
  return out;
}

double onmi(LabelSet const &a, LabelSet const &b)
{
  if (a.size() != b.size())
  {
    throw InvalidArgument("onmi: covers differ in node count");
  }
  if (a.empty())
  {
    return 0.0;
  }
  auto const   x   = communities_of(a);
  auto const   y   = communities_of(b);
  double const hxy = conditional_cover_entropy(x, y, a.size());
  double const hyx = conditional_cover_entropy(y, x, a.size());
  return std::clamp(1.0 - 0.5 * (hxy + hyx), 0.0, 1.0);
}

double overlap_rate(LabelSet const &y)
{
  if (y.empty())
  {
    return 0.0;
  }
  std::size_t multi = 0;
  for (auto const &s : y)
  {
    multi += std::set<std::uint32_t>(s.begin(), s.end()).size() > 1 ? 1 : 0;
  }
  return static_cast<double>(multi) / static_cast<double>(y.size());
}

std::size_t max_label_affiliation(LabelSet const &y)
{
  std::size_t best = 0;
  for (auto const &s : y)
  {
    best = std::max(best, std::set<std::uint32_t>(s.begin(), s.end()).size());
  }
  return best;
}

double modularity(Graph const &g, std::span<std::size_t const> labels)
{
  if (labels.size() != g.num_nodes())
  {
    throw InvalidArgument("modularity: one label per node required");
  }
  double const two_m = 2.0 * static_cast<double>(g.num_edges());
  if (two_m == 0.0)
  {
    return 0.0;
  }
  std::map<std::size_t, double> tot;
  double                        inside = 0.0;
  for (NodeId v = 0; v < g.num_nodes(); ++v)
  {
    tot[labels[v]] += static_cast<double>(g.degree(v));
    for (NodeId u : g.neighbors(v))
    {
      inside += labels[u] == labels[v] ? 1.0 : 0.0;
    }
  }
  double q = inside / two_m;
  for (auto const &[c, t] : tot)
  {
    q -= (t / two_m) * (t / two_m);
  }
  return q;
}

}  // namespace unicom
