#pragma once
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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "unicom/graph.hpp"
#include "unicom/metrics.hpp"

namespace unicom {

struct Query
{
  std::string         id;
  std::vector<NodeId> nodes;
  std::vector<NodeId> positives;
  std::vector<NodeId> negatives;
};

enum class FeatureFormat
{
  automatic,  // binary above kBinaryFeatureThreshold nodes
  csv,
  binary,
};

inline constexpr std::size_t kBinaryFeatureThreshold = 100000;

struct DatasetBundle
{
  std::string             name;
  Graph                   graph;
  std::optional<LabelSet> labels;
  std::vector<Query>      queries;
  std::size_t             communities = 0;
  bool                    overlapping = false;
};

// Directory layout: meta.json, graph.tsv, features.csv or features/ (manifest
// plus raw floats), optional labels.tsv and queries.tsv.
DatasetBundle load_bundle(std::filesystem::path const &dir);
void          save_bundle(DatasetBundle const &bundle, std::filesystem::path const &dir,
                          FeatureFormat format = FeatureFormat::automatic);

LabelSet           load_labels(std::filesystem::path const &path, std::size_t n_nodes);
void               save_labels(LabelSet const &labels, std::filesystem::path const &path);
std::vector<Query> load_queries(std::filesystem::path const &path, std::size_t n_nodes);
void               save_queries(std::vector<Query> const &queries, std::filesystem::path const &path);

// One line per query: id, then the retrieved nodes.
using CommunityList = std::vector<std::pair<std::string, std::vector<NodeId>>>;
CommunityList load_communities(std::filesystem::path const &path, std::size_t n_nodes);
void          save_communities(CommunityList const &result, std::filesystem::path const &path);

struct SbmParams
{
  std::size_t   blocks      = 2;
  std::size_t   block_size  = 50;
  double        p_in        = 0.3;
  double        p_out       = 0.02;
  std::size_t   feature_dim = 16;
  double        separation  = 3.0;
  double        overlap     = 0.0;  // fraction of nodes given a second block
  std::uint64_t seed        = 0;
  std::string   name        = "sbm";

  void validate() const;
};

DatasetBundle sbm_generate(SbmParams const &params);

struct QuerySamplerOptions
{
  std::size_t   per_community = 20;
  double        rate          = 0.0;  // > 0: ceil(rate * |C|) queries per community instead
  std::size_t   min_size      = 1;
  std::size_t   max_size      = 3;
  std::size_t   positives     = 3;
  std::size_t   negatives     = 3;
  std::uint64_t seed          = 0;
};

std::vector<Query> sample_queries(DatasetBundle const &bundle, QuerySamplerOptions const &options);

// Lowest-id community containing every query node.
std::vector<NodeId> query_truth(LabelSet const &labels, Query const &query);

}  // namespace unicom
