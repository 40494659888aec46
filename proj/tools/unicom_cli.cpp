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

// Command-line front end. Links only the C interface of the library.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "unicom/unicom.h"

namespace {

constexpr int kExitInvalid = 2;

// Owns a C handle and releases it with the matching _free function.
template <typename T, void (*Free)(T *)>
class Handle
{
public:
  Handle() = default;
  Handle(Handle const &)            = delete;
  Handle &operator=(Handle const &) = delete;
  ~Handle()
  {
    Free(ptr_);
  }

  T **out()
  {
    return &ptr_;
  }
  T *get() const
  {
    return ptr_;
  }

private:
  T *ptr_ = nullptr;
};

using Config  = Handle<unicom_config, unicom_config_free>;
using Bundle  = Handle<unicom_bundle, unicom_bundle_free>;
using Queries = Handle<unicom_queries, unicom_queries_free>;
using Result  = Handle<unicom_result, unicom_result_free>;

struct Failure
{
  int code;
};

void check(unicom_status status)
{
  if (status != UNICOM_OK)
  {
    std::fprintf(stderr, "error: %s\n", unicom_last_error());
    throw Failure{static_cast<int>(status)};
  }
}

struct Globals
{
  std::optional<std::uint64_t> seed;
  std::string                  config_path;
  std::size_t                  threads = 1;
};

void load_config(Globals const &g, Config &config)
{
  check(g.config_path.empty() ? unicom_config_default(config.out())
                              : unicom_config_load(g.config_path.c_str(), config.out()));
  if (g.seed)
  {
    check(unicom_config_set_seed(config.get(), *g.seed));
  }
  check(unicom_config_set_threads(config.get(), g.threads));
}

void load_bundle(std::string const &dir, Bundle &bundle)
{
  check(unicom_bundle_load(dir.c_str(), bundle.out()));
}

std::vector<char const *> c_strings(std::vector<std::string> const &items)
{
  std::vector<char const *> out;
  for (auto const &s : items)
  {
    out.push_back(s.c_str());
  }
  return out;
}

unicom_task task_of(std::string const &name)
{
  unicom_task t{};
  check(unicom_task_parse(name.c_str(), &t));
  return t;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Community search and detection with frozen pre-trained graph transformers"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", unicom_version());

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice");
  app.add_option("--config", g.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--threads", g.threads, "Experts processed in parallel")->check(CLI::PositiveNumber);

  std::string              input, out, target, queries_path, metric, pred, task, expert_out;
  std::vector<std::string> ckpts, inputs;
  std::size_t              k = 0, size = 0;
  bool                     overlap   = false;
  std::optional<double>    threshold;

  auto *preprocess = app.add_subcommand("preprocess", "Tokenise a graph and write the token cache");
  preprocess->add_option("--input", input, "Dataset bundle")->required();
  preprocess->add_option("--out", out, "Output directory")->required();

  auto *pretrain = app.add_subcommand("pretrain", "Pre-train one expert on a source graph");
  pretrain->add_option("--source", input, "Source dataset bundle")->required();
  pretrain->add_option("--out", out, "Checkpoint directory")->required();

  auto *adapt = app.add_subcommand("adapt", "Train adapters for a target graph");
  adapt->add_option("--task", task, "cs, dcd or ocd")->required()->check(CLI::IsMember({"cs", "dcd", "ocd"}));
  adapt->add_option("--ckpt", ckpts, "Checkpoint directories")->required();
  adapt->add_option("--target", target, "Target dataset bundle")->required();
  adapt->add_option("--k", k, "Community count (default: from the bundle)");

  auto *search = app.add_subcommand("search", "Community search for a set of queries");
  search->add_option("--ckpt", ckpts, "Checkpoint directories")->required();
  search->add_option("--target", target, "Target dataset bundle")->required();
  search->add_option("--queries", queries_path, "Query file (default: the bundle's queries)");
  search->add_option("--size", size, "Community size r")->required()->check(CLI::PositiveNumber);
  search->add_option("--out", out, "Result file")->required();
  search->add_option("--expert-out", expert_out, "Directory for per-expert outputs");

  auto *detect = app.add_subcommand("detect", "Disjoint or overlapping community detection");
  detect->add_option("--ckpt", ckpts, "Checkpoint directories")->required();
  detect->add_option("--target", target, "Target dataset bundle")->required();
  detect->add_option("--k", k, "Community count K")->required()->check(CLI::PositiveNumber);
  detect->add_flag("--overlap", overlap, "Overlapping detection");
  detect->add_option("--threshold", threshold, "Membership threshold for --overlap");
  detect->add_option("--out", out, "Result file")->required();
  detect->add_option("--expert-out", expert_out, "Directory for per-expert outputs");

  auto *fuse = app.add_subcommand("fuse", "Fuse per-expert outputs written with --expert-out");
  fuse->add_option("--inputs", inputs, "Expert output directories")->required();
  fuse->add_option("--size", size, "Community size r (search outputs)");
  fuse->add_option("--k", k, "Community count K (disjoint outputs)");
  fuse->add_option("--threshold", threshold, "Membership threshold (overlapping outputs)");
  fuse->add_option("--out", out, "Result file")->required();

  auto *eval = app.add_subcommand("eval", "Score a result file");
  eval->add_option("--metric", metric, "f1, nmi, jac, onmi, or, mla")
      ->required()
      ->check(CLI::IsMember({"f1", "nmi", "jac", "onmi", "or", "mla"}));
  eval->add_option("--pred", pred, "Result file")->required();
  eval->add_option("--target", target, "Dataset bundle with ground truth")->required();
  eval->add_option("--queries", queries_path, "Query file (default: the bundle's queries)");

  unicom_sbm_params sbm;
  unicom_sbm_params_default(&sbm);
  std::string sbm_name = "sbm";
  auto       *gen      = app.add_subcommand("gen-sbm", "Generate a planted-partition dataset bundle");
  gen->add_option("--out", out, "Output directory")->required();
  gen->add_option("--blocks", sbm.blocks, "Number of blocks")->capture_default_str();
  gen->add_option("--block-size", sbm.block_size, "Nodes per block")->capture_default_str();
  gen->add_option("--p-in", sbm.p_in, "Edge probability inside a block")->capture_default_str();
  gen->add_option("--p-out", sbm.p_out, "Edge probability across blocks")->capture_default_str();
  gen->add_option("--dim", sbm.feature_dim, "Feature dimension")->capture_default_str();
  gen->add_option("--separation", sbm.separation, "Distance scale of block means")->capture_default_str();
  gen->add_option("--overlap", sbm.overlap, "Fraction of nodes in two blocks")->capture_default_str();
  gen->add_option("--queries-per-community", sbm.queries_per_community, "Sampled queries per block")
      ->capture_default_str();
  gen->add_option("--name", sbm_name, "Dataset name")->capture_default_str();

  try
  {
    app.parse(argc, argv);
  }
  catch (CLI::ParseError const &e)
  {
    int const code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try
  {
    Config config;
    load_config(g, config);
    double const t = threshold.value_or(unicom_config_threshold(config.get()));
    auto const   c = c_strings(ckpts);

    if (*preprocess)
    {
      Bundle b;
      load_bundle(input, b);
      check(unicom_preprocess(config.get(), b.get(), out.c_str()));
      std::printf("tokens written to %s\n", out.c_str());
    }
    else if (*pretrain)
    {
      Bundle b;
      load_bundle(input, b);
      check(unicom_pretrain(config.get(), b.get(), out.c_str()));
      std::printf("checkpoint written to %s\n", out.c_str());
    }
    else if (*adapt)
    {
      Bundle b;
      load_bundle(target, b);
      check(unicom_adapt(config.get(), task_of(task), c.data(), c.size(), b.get(), k));
      for (auto const &dir : ckpts)
      {
        std::printf("adapter written to %s/adapter/%s\n", dir.c_str(), task.c_str());
      }
    }
    else if (*search)
    {
      Bundle  b;
      Queries q;
      Result  r;
      load_bundle(target, b);
      check(queries_path.empty() ? unicom_queries_from_bundle(b.get(), q.out())
                                 : unicom_queries_load(queries_path.c_str(), b.get(), q.out()));
      check(unicom_search(config.get(), c.data(), c.size(), b.get(), q.get(), size,
                          expert_out.empty() ? nullptr : expert_out.c_str(), r.out()));
      check(unicom_result_save(r.get(), out.c_str()));
    }
    else if (*detect)
    {
      Bundle b;
      Result r;
      load_bundle(target, b);
      check(unicom_detect(config.get(), c.data(), c.size(), b.get(), k, overlap ? 1 : 0, t,
                          expert_out.empty() ? nullptr : expert_out.c_str(), r.out()));
      check(unicom_result_save(r.get(), out.c_str()));
    }
    else if (*fuse)
    {
      Result     r;
      auto const dirs = c_strings(inputs);
      check(unicom_fuse(dirs.data(), dirs.size(), size, k, t, g.seed.value_or(0), r.out()));
      check(unicom_result_save(r.get(), out.c_str()));
    }
    else if (*eval)
    {
      Bundle  b;
      Queries q;
      Result  r;
      load_bundle(target, b);
      if (!queries_path.empty())
      {
        check(unicom_queries_load(queries_path.c_str(), b.get(), q.out()));
      }
      unicom_task const kind = metric == "f1" || metric == "jac" ? UNICOM_TASK_CS
                               : metric == "nmi"                 ? UNICOM_TASK_DCD
                                                                 : UNICOM_TASK_OCD;
      check(unicom_result_load(kind, pred.c_str(), b.get(), r.out()));
      double value = 0.0;
      check(unicom_evaluate(metric.c_str(), r.get(), b.get(), q.get(), &value));
      std::printf("%s\t%.6f\n", metric.c_str(), value);
    }
    else if (*gen)
    {
      Bundle b;
      sbm.seed = g.seed.value_or(0);
      sbm.name = sbm_name.c_str();
      check(unicom_sbm_generate(&sbm, b.out()));
      check(unicom_bundle_save(b.get(), out.c_str()));
      std::printf("%zu nodes, %zu edges written to %s\n", unicom_bundle_num_nodes(b.get()),
                  unicom_bundle_num_edges(b.get()), out.c_str());
    }
  }
  catch (Failure const &f)
  {
    return f.code;
  }
  return 0;
}
