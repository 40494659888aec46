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

#include "unicom/fusion.hpp"

#include <cmath>
#include <limits>

#include "unicom/error.hpp"

namespace unicom {

std::vector<std::size_t> hungarian(Matrix const &costs)
{
  if (costs.rows != costs.cols)
  {
    throw InvalidArgument("hungarian: cost matrix must be square");
  }
  std::size_t const n   = costs.rows;
  double const      inf = std::numeric_limits<double>::infinity();
  for (float c : costs.data)
  {
    if (!std::isfinite(c))
    {
      throw InvalidArgument("hungarian: costs must be finite");
    }
  }
  // Shortest augmenting paths with row/column potentials; index 0 is a sentinel.
  std::vector<double>      u(n + 1), v(n + 1);
  std::vector<std::size_t> match(n + 1), way(n + 1);
  for (std::size_t i = 1; i <= n; ++i)
  {
    match[0]       = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool>   used(n + 1, false);
    do
    {
      used[j0]          = true;
      std::size_t const i0 = match[j0];
      double            delta = inf;
      std::size_t       j1    = 0;
      for (std::size_t j = 1; j <= n; ++j)
      {
        if (used[j])
        {
          continue;
        }
        double const cur = static_cast<double>(costs(i0 - 1, j - 1)) - u[i0] - v[j];
        if (cur < minv[j])
        {
          minv[j] = cur;
          way[j]  = j0;
        }
        if (minv[j] < delta)
        {
          delta = minv[j];
          j1    = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j)
      {
        if (used[j])
        {
          u[match[j]] += delta;
          v[j] -= delta;
        }
        else
        {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do
    {
      std::size_t const j1 = way[j0];
      match[j0]            = match[j1];
      j0                   = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= n; ++j)
  {
    assignment[match[j] - 1] = j - 1;
  }
  return assignment;
}

CsResult fuse_cs(std::span<std::vector<double> const> scores, std::span<NodeId const> query,
                 std::size_t r)
{
  if (scores.empty())
  {
    throw InvalidArgument("fuse_cs: no experts");
  }
  std::size_t const n = scores.front().size();
  CsResult          res;
  res.scores.assign(n, 0.0);
  for (auto const &s : scores)
  {
    if (s.size() != n)
    {
      throw InvalidArgument("fuse_cs: experts scored different node sets");
    }
    for (std::size_t v = 0; v < n; ++v)
    {
      res.scores[v] += s[v];
    }
  }
  for (auto &s : res.scores)
  {
    s /= static_cast<double>(scores.size());
  }
  res.community = rank_top_r(res.scores, query, r);
  return res;
}

std::vector<std::size_t> fuse_dcd(std::span<Matrix const> reps, std::size_t k, std::uint64_t seed)
{
  if (reps.empty())
  {
    throw InvalidArgument("fuse_dcd: no experts");
  }
  Matrix joined = reps.front();
  for (std::size_t i = 1; i < reps.size(); ++i)
  {
    joined = hconcat(joined, reps[i]);
  }
  return dcd_expert(joined, k, seed);
}

std::vector<std::size_t> align_columns(Matrix const &reference, Matrix const &y)
{
  if (reference.rows != y.rows || reference.cols != y.cols)
  {
    throw InvalidArgument("align_columns: matrices differ in shape");
  }
  std::size_t const k = y.cols;
  auto column = [](Matrix const &m, std::size_t c) {
    std::vector<float> out(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
    {
      out[i] = m(i, c);
    }
    return out;
  };
  Matrix costs(k, k);
  for (std::size_t i = 0; i < k; ++i)
  {
    auto const yi = column(y, i);
    for (std::size_t j = 0; j < k; ++j)
    {
      costs(i, j) = static_cast<float>(1.0 - cosine(yi, column(reference, j)));
    }
  }
  auto const               assign = hungarian(costs);
  std::vector<std::size_t> source_of(k);
  for (std::size_t i = 0; i < k; ++i)
  {
    source_of[assign[i]] = i;
  }
  return source_of;
}

OcdFusion fuse_ocd(std::span<Matrix const> ys, double threshold)
{
  if (ys.empty())
  {
    throw InvalidArgument("fuse_ocd: no experts");
  }
  Matrix const &ref = ys.front();
  OcdFusion     out;
  out.mean = Matrix(ref.rows, ref.cols);
  std::vector<double> acc(ref.data.size());
  for (auto const &y : ys)
  {
    auto const source_of = align_columns(ref, y);
    for (std::size_t v = 0; v < y.rows; ++v)
    {
      for (std::size_t j = 0; j < y.cols; ++j)
      {
        acc[v * y.cols + j] += y(v, source_of[j]);
      }
    }
  }
  for (std::size_t i = 0; i < acc.size(); ++i)
  {
    out.mean.data[i] = static_cast<float>(acc[i] / static_cast<double>(ys.size()));
  }
  out.memberships = threshold_memberships(out.mean, threshold);
  return out;
}

}  // namespace unicom
