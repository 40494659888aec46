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
#include <span>
#include <vector>

#include "unicom/graph.hpp"

namespace unicom {

// Per-node community ids; singleton sets for disjoint data.
using LabelSet = std::vector<std::vector<std::uint32_t>>;

double set_f1(std::span<NodeId const> pred, std::span<NodeId const> truth);
double set_jaccard(std::span<NodeId const> pred, std::span<NodeId const> truth);

// Mutual information over the arithmetic mean of the two entropies; 0 when
// either partition has zero entropy.
double nmi(std::span<std::size_t const> a, std::span<std::size_t const> b);

// NMI between the in/out indicator partitions of two node sets over n nodes.
double membership_nmi(std::span<NodeId const> pred, std::span<NodeId const> truth, std::size_t n);

// Overlapping NMI of Lancichinetti, Fortunato and Kertesz.
double onmi(LabelSet const &a, LabelSet const &b);

double overlap_rate(LabelSet const &y);
std::size_t max_label_affiliation(LabelSet const &y);

double modularity(Graph const &g, std::span<std::size_t const> labels);

// Members of every community, indexed by community id.
std::vector<std::vector<NodeId>> communities_of(LabelSet const &y);

LabelSet labels_from_partition(std::span<std::size_t const> labels);

}  // namespace unicom
