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

#include "unicom/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "unicom/positional.hpp"

namespace unicom {

Matrix positional_columns(Graph const &g, std::size_t pe_dim)
{
  std::size_t const n = g.num_nodes();
  Matrix            out(n, pe_dim);
  std::size_t const usable = n == 0 ? 0 : std::min(pe_dim, n - 1);
  if (usable == 0)
  {
    return out;
  }
  Matrix const pe = laplacian_pe(g, usable);
  for (std::size_t v = 0; v < n; ++v)
  {
    std::copy(pe.row(v).begin(), pe.row(v).end(), out.row(v).begin());
  }
  return out;
}

std::size_t feature_cluster_count(PreprocessConfig const &config, std::size_t n_nodes,
                                  std::size_t known_communities)
{
  std::size_t k = config.k_feat;
  if (k == 0)
  {
    k = known_communities > 0
            ? known_communities
            : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_nodes))));
  }
  return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(1, n_nodes));
}

Preprocessed preprocess(Graph const &g, PreprocessConfig const &config,
                        std::size_t known_communities)
{
  Preprocessed out;
  out.augmented = config.pe_dim > 0 ? hconcat(g.features(), positional_columns(g, config.pe_dim))
                                    : g.features();

  auto const stack = propagate(g, out.augmented, config.h_max);
  auto       aug   = build_aug_tokens(stack, select_local_hops(g, config.h_max));

  KMeansOptions km;
  km.seed  = config.seed;
  out.feat = kmeans(out.augmented, feature_cluster_count(config, g.num_nodes(), known_communities), km);

  LouvainOptions lv;
  lv.seed  = config.seed;
  out.strc = louvain(g, lv).assignment;

  out.tokens = assemble_cohesive_tokens(
      std::move(aug), {feature_prompt(out.augmented, out.feat), structure_prompt(out.augmented, out.strc)});
  return out;
}

}  // namespace unicom
