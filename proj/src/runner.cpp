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

#include "unicom/runner.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <set>
#include <thread>

#include "tensor_store.hpp"
#include "unicom/error.hpp"
#include "unicom/experts.hpp"
#include "unicom/fusion.hpp"

namespace unicom {

namespace fs = std::filesystem;

namespace {

template <typename Fn>
void for_each_expert(std::size_t count, std::size_t threads, Fn &&fn)
{
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t>        next{0};
  auto                            worker = [&] {
    for (std::size_t i; (i = next++) < count;)
    {
      try
      {
        fn(i);
      }
      catch (...)
      {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t const n_threads = std::min(threads, count);
  if (n_threads <= 1)
  {
    worker();
  }
  else
  {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t)
    {
      pool.emplace_back(worker);
    }
    for (auto &t : pool)
    {
      t.join();
    }
  }
  for (auto const &e : errors)
  {
    if (e)
    {
      std::rethrow_exception(e);
    }
  }
}

void check_checkpoints(std::span<fs::path const> checkpoints)
{
  if (checkpoints.empty())
  {
    throw InvalidArgument("at least one checkpoint is required");
  }
  std::set<fs::path> seen;
  for (auto const &p : checkpoints)
  {
    if (!seen.insert(fs::weakly_canonical(p)).second)
    {
      throw InvalidArgument("checkpoint listed twice: " + p.string());
    }
  }
}

struct Prepared
{
  ExpertCheckpoint ckpt;
  Preprocessed     data;
};

Prepared prepare(fs::path const &dir, Graph const &g, std::size_t known_communities)
{
  Prepared p;
  p.ckpt = load_checkpoint(dir);
  p.data = preprocess_target(g, p.ckpt, known_communities);
  return p;
}

Adapter train_adapter(fs::path const &dir, Prepared const &p, DatasetBundle const &target,
                      std::span<Query const> queries, DasConfig const &config)
{
  auto res                   = das_train(target.graph, p.data.tokens, p.ckpt, queries, config);
  res.adapter.target_name    = target.name;
  save_adapter(res.adapter, adapter_dir(dir, config.task));
  return std::move(res.adapter);
}

Adapter ensure_adapter(fs::path const &dir, Prepared const &p, DatasetBundle const &target,
                       std::span<Query const> queries, DasConfig const &config)
{
  fs::path const where = adapter_dir(dir, config.task);
  if (fs::exists(where / "manifest.json"))
  {
    Adapter a = load_adapter(where);
    if (a.target_name == target.name && a.target_width() == p.data.tokens.width &&
        a.source_width() == p.ckpt.params.config.input_dim &&
        (config.task == Task::cs || a.communities == config.communities))
    {
      return a;
    }
    warn("adapter in " + where.string() + " was built for another target; retraining");
  }
  return train_adapter(dir, p, target, queries, config);
}

std::vector<Query> labelled(std::span<Query const> queries)
{
  std::vector<Query> out;
  std::copy_if(queries.begin(), queries.end(), std::back_inserter(out),
               [](Query const &q) { return !q.positives.empty() || !q.negatives.empty(); });
  return out;
}

std::vector<Query> training_queries(DatasetBundle const &target, std::span<Query const> queries)
{
  auto out = labelled(target.queries);
  if (out.empty())
  {
    out = labelled(queries);
  }
  if (out.empty())
  {
    throw InvalidArgument("community search needs training queries with positive or negative nodes");
  }
  return out;
}

std::size_t resolve_k(std::size_t k, DatasetBundle const &target)
{
  std::size_t const out = k != 0 ? k : target.communities;
  if (out == 0)
  {
    throw InvalidArgument("community count unknown; pass K explicitly");
  }
  if (out > target.graph.num_nodes())
  {
    throw InvalidArgument("K exceeds the node count");
  }
  return out;
}

fs::path dump_path(fs::path const &dir, std::size_t i)
{
  return dir / ("expert" + std::to_string(i));
}

}  // namespace

void save_preprocessed(Preprocessed const &data, fs::path const &dir)
{
  fs::create_directories(dir);
  TokenTensor const &t = data.tokens;
  Matrix             mask(t.nodes, t.tokens);
  std::transform(t.mask.begin(), t.mask.end(), mask.data.begin(),
                 [](std::uint8_t m) { return static_cast<float>(m); });
  store::Json m;
  m["format_version"] = 1;
  m["kind"]           = "token_cache";
  m["byte_order"]     = "little";
  m["nodes"]          = t.nodes;
  m["tokens_per_node"] = t.tokens;
  m["width"]          = t.width;
  m["h_max"]          = t.h_max();
  m["selected_hop"]   = t.selected_hop;
  m["feature_clusters"] = {{"k", data.feat.k}, {"labels", data.feat.labels}};
  m["structure_clusters"] = {{"k", data.strc.k}, {"labels", data.strc.labels}};
  m["tokens"] = store::save_matrix(Matrix(t.nodes * t.tokens, t.width, t.values), "tokens", dir);
  m["mask"]   = store::save_matrix(mask, "mask", dir);
  store::write_manifest(m, dir);
}

void save_result(TaskResult const &result, fs::path const &path)
{
  if (path.has_parent_path())
  {
    fs::create_directories(path.parent_path());
  }
  if (result.task == Task::cs)
  {
    save_communities(result.searched, path);
  }
  else
  {
    save_labels(result.labels, path);
  }
}

TaskResult load_result(Task task, fs::path const &path, std::size_t n_nodes)
{
  TaskResult r;
  r.task = task;
  if (task == Task::cs)
  {
    r.searched = load_communities(path, n_nodes);
  }
  else
  {
    r.labels = load_labels(path, n_nodes);
  }
  return r;
}

void save_expert_dump(ExpertDump const &dump, fs::path const &dir)
{
  fs::create_directories(dir);
  store::Json m;
  m["format_version"] = 1;
  m["kind"]           = "expert_output";
  m["byte_order"]     = "little";
  m["task"]           = task_name(dump.task);
  m["num_nodes"]      = dump.num_nodes;
  store::Json qs      = store::Json::array();
  for (auto const &q : dump.queries)
  {
    qs.push_back({{"id", q.id}, {"nodes", q.nodes}});
  }
  m["queries"] = qs;
  switch (dump.task)
  {
  case Task::cs:
    m["scores"] = store::save_matrix(dump.scores, "scores", dir);
    break;
  case Task::dcd:
    m["rep"] = store::save_matrix(dump.rep, "rep", dir);
    break;
  case Task::ocd:
    m["affiliation"] = store::save_matrix(dump.affiliation, "affiliation", dir);
    break;
  }
  store::write_manifest(m, dir);
}

ExpertDump load_expert_dump(fs::path const &dir)
{
  auto const m = store::read_manifest(dir);
  try
  {
    if (m.at("kind").get<std::string>() != "expert_output")
    {
      throw InvalidArgument(dir.string() + ": not an expert output directory");
    }
    ExpertDump d;
    d.task      = parse_task(m.at("task").get<std::string>());
    d.num_nodes = m.at("num_nodes").get<std::size_t>();
    for (auto const &q : m.at("queries"))
    {
      Query query;
      query.id    = q.at("id").get<std::string>();
      query.nodes = q.at("nodes").get<std::vector<NodeId>>();
      d.queries.push_back(std::move(query));
    }
    switch (d.task)
    {
    case Task::cs:
      d.scores = store::load_matrix(m.at("scores"), dir);
      if (d.scores.rows != d.queries.size() || d.scores.cols != d.num_nodes)
      {
        throw InvalidArgument(dir.string() + ": score matrix shape disagrees with manifest");
      }
      break;
    case Task::dcd:
      d.rep = store::load_matrix(m.at("rep"), dir);
      if (d.rep.rows != d.num_nodes)
      {
        throw InvalidArgument(dir.string() + ": embedding rows disagree with manifest");
      }
      break;
    case Task::ocd:
      d.affiliation = store::load_matrix(m.at("affiliation"), dir);
      if (d.affiliation.rows != d.num_nodes)
      {
        throw InvalidArgument(dir.string() + ": affiliation rows disagree with manifest");
      }
      break;
    }
    return d;
  }
  catch (store::Json::exception const &e)
  {
    throw InvalidArgument(dir.string() + ": malformed manifest: " + e.what());
  }
}

std::vector<AdaptReport> adapt_experts(RunConfig const &config, Task task,
                                       std::span<fs::path const> checkpoints,
                                       DatasetBundle const &target, std::size_t communities)
{
  config.validate();
  check_checkpoints(checkpoints);
  std::vector<Query> queries;
  std::size_t        k = 0;
  if (task == Task::cs)
  {
    queries = training_queries(target, {});
  }
  else
  {
    k = resolve_k(communities, target);
  }
  DasConfig const          das = config.das_config(task, k);
  std::vector<AdaptReport> reports(checkpoints.size());
  for_each_expert(checkpoints.size(), config.threads, [&](std::size_t i) {
    auto const    p = prepare(checkpoints[i], target.graph, k != 0 ? k : target.communities);
    Adapter const a = train_adapter(checkpoints[i], p, target, queries, das);
    reports[i]      = {checkpoints[i], a.loss_history, a.parameter_count(), p.ckpt.params.parameter_count()};
  });
  return reports;
}

TaskResult search(RunConfig const &config, std::span<fs::path const> checkpoints,
                  DatasetBundle const &target, std::span<Query const> queries, std::size_t r,
                  std::optional<fs::path> const &dump_dir)
{
  config.validate();
  check_checkpoints(checkpoints);
  std::size_t const n = target.graph.num_nodes();
  if (queries.empty())
  {
    throw InvalidArgument("search: no queries");
  }
  if (r == 0 || r > n)
  {
    throw InvalidArgument("search: size r must lie in [1, |V|]");
  }
  for (auto const &q : queries)
  {
    if (q.nodes.empty() || q.nodes.size() > r)
    {
      throw InvalidArgument("search: query " + q.id + " is empty or larger than r");
    }
  }
  auto const      train = training_queries(target, queries);
  DasConfig const das   = config.das_config(Task::cs, 0);

  std::vector<std::vector<std::vector<double>>> scores(checkpoints.size());
  for_each_expert(checkpoints.size(), config.threads, [&](std::size_t i) {
    auto const    p   = prepare(checkpoints[i], target.graph, target.communities);
    Adapter const a   = ensure_adapter(checkpoints[i], p, target, train, das);
    auto const    out = run_expert(p.ckpt, a, p.data.tokens);
    Matrix const  rep = node_representation(out.embeddings.node, out.embeddings.com);
    for (auto const &q : queries)
    {
      scores[i].push_back(cs_scores(q.nodes, rep));
    }
    if (dump_dir)
    {
      ExpertDump d;
      d.task      = Task::cs;
      d.num_nodes = n;
      d.queries.assign(queries.begin(), queries.end());
      d.scores = Matrix(queries.size(), n);
      for (std::size_t qi = 0; qi < queries.size(); ++qi)
      {
        std::transform(scores[i][qi].begin(), scores[i][qi].end(), d.scores.row(qi).begin(),
                       [](double s) { return static_cast<float>(s); });
      }
      save_expert_dump(d, dump_path(*dump_dir, i));
    }
  });

  TaskResult res;
  res.task = Task::cs;
  for (std::size_t qi = 0; qi < queries.size(); ++qi)
  {
    std::vector<std::vector<double>> per_expert;
    for (auto const &s : scores)
    {
      per_expert.push_back(s[qi]);
    }
    res.searched.emplace_back(queries[qi].id, fuse_cs(per_expert, queries[qi].nodes, r).community);
  }
  return res;
}

TaskResult detect(RunConfig const &config, std::span<fs::path const> checkpoints,
                  DatasetBundle const &target, std::size_t k, bool overlap, double threshold,
                  std::optional<fs::path> const &dump_dir)
{
  config.validate();
  check_checkpoints(checkpoints);
  if (!(threshold > 0.0))
  {
    throw InvalidArgument("detect: threshold must be positive");
  }
  k                     = resolve_k(k, target);
  Task const      task  = overlap ? Task::ocd : Task::dcd;
  DasConfig const das   = config.das_config(task, k);
  std::size_t const n   = target.graph.num_nodes();
  if (task == Task::dcd && k < 2)
  {
    throw InvalidArgument("detect: disjoint detection needs K >= 2");
  }

  std::vector<Matrix> outputs(checkpoints.size());
  for_each_expert(checkpoints.size(), config.threads, [&](std::size_t i) {
    auto const    p   = prepare(checkpoints[i], target.graph, k);
    Adapter const a   = ensure_adapter(checkpoints[i], p, target, {}, das);
    auto const    out = run_expert(p.ckpt, a, p.data.tokens);
    outputs[i] = overlap ? out.affiliation : node_representation(out.embeddings.node, out.embeddings.com);
    if (dump_dir)
    {
      ExpertDump d;
      d.task      = task;
      d.num_nodes = n;
      (overlap ? d.affiliation : d.rep) = outputs[i];
      save_expert_dump(d, dump_path(*dump_dir, i));
    }
  });

  TaskResult res;
  res.task   = task;
  res.labels = overlap ? fuse_ocd(outputs, threshold).memberships
                       : labels_from_partition(fuse_dcd(outputs, k, config.seed));
  return res;
}

TaskResult fuse_dumps(std::span<ExpertDump const> dumps, std::size_t r, std::size_t k,
                      double threshold, std::uint64_t seed)
{
  if (dumps.empty())
  {
    throw InvalidArgument("fuse: no expert outputs");
  }
  Task const        task = dumps.front().task;
  std::size_t const n    = dumps.front().num_nodes;
  for (auto const &d : dumps)
  {
    if (d.task != task || d.num_nodes != n)
    {
      throw InvalidArgument("fuse: expert outputs disagree on task or node count");
    }
  }
  TaskResult res;
  res.task = task;
  switch (task)
  {
  case Task::cs:
  {
    if (r == 0 || r > n)
    {
      throw InvalidArgument("fuse: size r must lie in [1, |V|]");
    }
    auto const &queries = dumps.front().queries;
    for (auto const &d : dumps)
    {
      if (d.queries.size() != queries.size() ||
          !std::equal(queries.begin(), queries.end(), d.queries.begin(),
                      [](Query const &a, Query const &b) { return a.id == b.id && a.nodes == b.nodes; }))
      {
        throw InvalidArgument("fuse: expert outputs were produced for different queries");
      }
    }
    for (std::size_t qi = 0; qi < queries.size(); ++qi)
    {
      std::vector<std::vector<double>> per_expert;
      for (auto const &d : dumps)
      {
        per_expert.emplace_back(d.scores.row(qi).begin(), d.scores.row(qi).end());
      }
      res.searched.emplace_back(queries[qi].id, fuse_cs(per_expert, queries[qi].nodes, r).community);
    }
    break;
  }
  case Task::dcd:
  {
    if (k < 2 || k > n)
    {
      throw InvalidArgument("fuse: K must lie in [2, |V|]");
    }
    std::vector<Matrix> reps;
    for (auto const &d : dumps)
    {
      reps.push_back(d.rep);
    }
    res.labels = labels_from_partition(fuse_dcd(reps, k, seed));
    break;
  }
  case Task::ocd:
  {
    std::vector<Matrix> ys;
    for (auto const &d : dumps)
    {
      ys.push_back(d.affiliation);
    }
    res.labels = fuse_ocd(ys, threshold).memberships;
    break;
  }
  }
  return res;
}

double evaluate(std::string const &metric, TaskResult const &prediction,
                DatasetBundle const &truth, std::span<Query const> queries)
{
  bool const search_metric = metric == "f1" || metric == "jac";
  if (search_metric != (prediction.task == Task::cs))
  {
    throw InvalidArgument("metric '" + metric + "' does not apply to " + task_name(prediction.task) +
                          " results");
  }
  if (metric == "or")
  {
    return overlap_rate(prediction.labels);
  }
  if (metric == "mla")
  {
    return static_cast<double>(max_label_affiliation(prediction.labels));
  }
  if (!truth.labels)
  {
    throw InvalidArgument("metric '" + metric + "' needs ground-truth labels");
  }
  LabelSet const &gt = *truth.labels;
  if (search_metric)
  {
    std::map<std::string, Query const *> by_id;
    for (auto const &q : queries)
    {
      by_id[q.id] = &q;
    }
    if (prediction.searched.empty())
    {
      throw InvalidArgument("no search results to evaluate");
    }
    double total = 0.0;
    for (auto const &[id, nodes] : prediction.searched)
    {
      auto const it = by_id.find(id);
      if (it == by_id.end())
      {
        throw InvalidArgument("result for unknown query '" + id + "'");
      }
      auto const t = query_truth(gt, *it->second);
      total += metric == "f1" ? set_f1(nodes, t) : set_jaccard(nodes, t);
    }
    return total / static_cast<double>(prediction.searched.size());
  }
  if (prediction.labels.size() != gt.size())
  {
    throw InvalidArgument("prediction and ground truth cover different node counts");
  }
  if (metric == "onmi")
  {
    return onmi(prediction.labels, gt);
  }
  if (metric == "nmi")
  {
    std::vector<std::size_t> a, b;
    for (std::size_t v = 0; v < gt.size(); ++v)
    {
      if (prediction.labels[v].empty() || gt[v].empty())
      {
        throw InvalidArgument("nmi needs at least one label per node");
      }
      a.push_back(prediction.labels[v].front());
      b.push_back(gt[v].front());
    }
    return nmi(a, b);
  }
  throw InvalidArgument("unknown metric '" + metric + "' (expected f1, nmi, jac, onmi, or, mla)");
}

}  // namespace unicom
