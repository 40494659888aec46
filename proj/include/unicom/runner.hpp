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

// Multi-expert orchestration behind the command-line tool: adapter caching,
// per-expert inference, fusion, result files and evaluation.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "unicom/config.hpp"
#include "unicom/das.hpp"
#include "unicom/dataset.hpp"
#include "unicom/metrics.hpp"

namespace unicom {

// Token cache: manifest plus tokens, mask and both cluster assignments.
void save_preprocessed(Preprocessed const &data, std::filesystem::path const &dir);

struct TaskResult
{
  Task          task = Task::cs;
  CommunityList searched;  // cs
  LabelSet      labels;    // dcd and ocd
};

void       save_result(TaskResult const &result, std::filesystem::path const &path);
TaskResult load_result(Task task, std::filesystem::path const &path, std::size_t n_nodes);

// Per-expert output kept for a later fuse step.
struct ExpertDump
{
  Task               task      = Task::cs;
  std::size_t        num_nodes = 0;
  std::vector<Query> queries;      // cs
  Matrix             scores;       // cs: one row of node scores per query
  Matrix             rep;          // dcd: [node_emb | com_emb]
  Matrix             affiliation;  // ocd
};

void       save_expert_dump(ExpertDump const &dump, std::filesystem::path const &dir);
ExpertDump load_expert_dump(std::filesystem::path const &dir);

struct AdaptReport
{
  std::filesystem::path checkpoint;
  std::vector<double>   loss;
  std::size_t           trainable = 0;
  std::size_t           backbone  = 0;
};

// Trains and stores one adapter per checkpoint. Experts run on up to
// config.threads threads; results do not depend on the thread count.
std::vector<AdaptReport> adapt_experts(RunConfig const &config, Task task,
                                       std::span<std::filesystem::path const> checkpoints,
                                       DatasetBundle const &target, std::size_t communities);

// Adapters are trained on the fly when missing or built for another target.
TaskResult search(RunConfig const &config, std::span<std::filesystem::path const> checkpoints,
                  DatasetBundle const &target, std::span<Query const> queries, std::size_t r,
                  std::optional<std::filesystem::path> const &dump_dir = std::nullopt);

TaskResult detect(RunConfig const &config, std::span<std::filesystem::path const> checkpoints,
                  DatasetBundle const &target, std::size_t k, bool overlap, double threshold,
                  std::optional<std::filesystem::path> const &dump_dir = std::nullopt);

TaskResult fuse_dumps(std::span<ExpertDump const> dumps, std::size_t r, std::size_t k,
                      double threshold, std::uint64_t seed);

// Metrics: f1 and jac (search results against the lowest shared community of
// each query), nmi (first label per node), onmi, or and mla.
double evaluate(std::string const &metric, TaskResult const &prediction,
                DatasetBundle const &truth, std::span<Query const> queries);

}  // namespace unicom
