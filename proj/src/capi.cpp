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

#include "unicom/unicom.h"

#include <atomic>
#include <cstdio>
#include <new>
#include <string>
#include <vector>

#include "unicom/config.hpp"
#include "unicom/dataset.hpp"
#include "unicom/error.hpp"
#include "unicom/runner.hpp"

struct unicom_config
{
  unicom::RunConfig value;
};

struct unicom_bundle
{
  unicom::DatasetBundle value;
};

struct unicom_queries
{
  std::vector<unicom::Query> value;
};

struct unicom_result
{
  unicom::TaskResult value;
};

namespace {

thread_local std::string last_error;

std::atomic<unicom_warning_fn> warning_handler{nullptr};

void forward_warning(std::string const &message)
{
  if (auto fn = warning_handler.load())
  {
    fn(message.c_str());
  }
  else
  {
    std::fprintf(stderr, "warning: %s\n", message.c_str());
  }
}

unicom_status fail(unicom_status status, char const *message)
{
  last_error = message;
  return status;
}

template <typename Fn>
unicom_status guarded(Fn &&fn)
{
  try
  {
    last_error.clear();
    fn();
    return UNICOM_OK;
  }
  catch (unicom::InvalidArgument const &e)
  {
    return fail(UNICOM_ERR_INVALID, e.what());
  }
  catch (unicom::IoError const &e)
  {
    return fail(UNICOM_ERR_INVALID, e.what());
  }
  catch (unicom::NumericalError const &e)
  {
    return fail(UNICOM_ERR_NUMERIC, e.what());
  }
  catch (std::bad_alloc const &)
  {
    return fail(UNICOM_ERR_INTERNAL, "out of memory");
  }
  catch (std::exception const &e)
  {
    return fail(UNICOM_ERR_INTERNAL, e.what());
  }
  catch (...)
  {
    return fail(UNICOM_ERR_INTERNAL, "unknown error");
  }
}

template <typename T>
T const &deref(T const *p, char const *what)
{
  if (p == nullptr)
  {
    throw unicom::InvalidArgument(std::string(what) + " is null");
  }
  return *p;
}

template <typename T>
void require_out(T **out)
{
  if (out == nullptr)
  {
    throw unicom::InvalidArgument("output pointer is null");
  }
  *out = nullptr;
}

std::string require_path(char const *path, char const *what)
{
  if (path == nullptr || *path == '\0')
  {
    throw unicom::InvalidArgument(std::string(what) + " is empty");
  }
  return path;
}

std::vector<std::filesystem::path> paths(char const *const *items, std::size_t n)
{
  if (items == nullptr && n > 0)
  {
    throw unicom::InvalidArgument("path list is null");
  }
  std::vector<std::filesystem::path> out;
  for (std::size_t i = 0; i < n; ++i)
  {
    out.emplace_back(require_path(items[i], "path"));
  }
  return out;
}

unicom::Task to_task(unicom_task t)
{
  switch (t)
  {
  case UNICOM_TASK_CS:
    return unicom::Task::cs;
  case UNICOM_TASK_DCD:
    return unicom::Task::dcd;
  case UNICOM_TASK_OCD:
    return unicom::Task::ocd;
  }
  throw unicom::InvalidArgument("unknown task value");
}

unicom_task from_task(unicom::Task t)
{
  switch (t)
  {
  case unicom::Task::cs:
    return UNICOM_TASK_CS;
  case unicom::Task::dcd:
    return UNICOM_TASK_DCD;
  case unicom::Task::ocd:
    return UNICOM_TASK_OCD;
  }
  return UNICOM_TASK_CS;
}

std::optional<std::filesystem::path> optional_path(char const *p)
{
  if (p == nullptr || *p == '\0')
  {
    return std::nullopt;
  }
  return std::filesystem::path(p);
}

}  // namespace

extern "C" {

char const *unicom_version(void)
{
  return "0.1.0";
}

char const *unicom_last_error(void)
{
  return last_error.c_str();
}

void unicom_set_warning_handler(unicom_warning_fn fn)
{
  warning_handler.store(fn);
  unicom::set_warning_sink(&forward_warning);
}

unicom_status unicom_task_parse(char const *name, unicom_task *out)
{
  return guarded([&] {
    if (out == nullptr)
    {
      throw unicom::InvalidArgument("output pointer is null");
    }
    *out = from_task(unicom::parse_task(require_path(name, "task name")));
  });
}

unicom_status unicom_config_default(unicom_config **out)
{
  return guarded([&] {
    require_out(out);
    *out = new unicom_config{};
  });
}

unicom_status unicom_config_load(char const *path, unicom_config **out)
{
  return guarded([&] {
    require_out(out);
    *out = new unicom_config{unicom::load_run_config(require_path(path, "config path"))};
  });
}

unicom_status unicom_config_set_seed(unicom_config *config, uint64_t seed)
{
  return guarded([&] {
    deref(config, "config");
    config->value.seed = seed;
  });
}

unicom_status unicom_config_set_threads(unicom_config *config, size_t threads)
{
  return guarded([&] {
    deref(config, "config");
    if (threads == 0)
    {
      throw unicom::InvalidArgument("threads must be positive");
    }
    config->value.threads = threads;
  });
}

double unicom_config_threshold(unicom_config const *config)
{
  return config ? config->value.threshold : unicom::RunConfig{}.threshold;
}

void unicom_config_free(unicom_config *config)
{
  delete config;
}

unicom_status unicom_bundle_load(char const *dir, unicom_bundle **out)
{
  return guarded([&] {
    require_out(out);
    *out = new unicom_bundle{unicom::load_bundle(require_path(dir, "bundle directory"))};
  });
}

unicom_status unicom_bundle_save(unicom_bundle const *bundle, char const *dir)
{
  return guarded([&] { unicom::save_bundle(deref(bundle, "bundle").value, require_path(dir, "bundle directory")); });
}

size_t unicom_bundle_num_nodes(unicom_bundle const *bundle)
{
  return bundle ? bundle->value.graph.num_nodes() : 0;
}

size_t unicom_bundle_num_edges(unicom_bundle const *bundle)
{
  return bundle ? bundle->value.graph.num_edges() : 0;
}

size_t unicom_bundle_communities(unicom_bundle const *bundle)
{
  return bundle ? bundle->value.communities : 0;
}

void unicom_bundle_free(unicom_bundle *bundle)
{
  delete bundle;
}

void unicom_sbm_params_default(unicom_sbm_params *params)
{
  if (params == nullptr)
  {
    return;
  }
  unicom::SbmParams const d;
  *params = unicom_sbm_params{d.blocks, d.block_size, d.p_in,  d.p_out, d.feature_dim,
                              d.separation, d.overlap, 20,     d.seed, nullptr};
}

unicom_status unicom_sbm_generate(unicom_sbm_params const *params, unicom_bundle **out)
{
  return guarded([&] {
    require_out(out);
    auto const       &p = deref(params, "parameters");
    unicom::SbmParams s;
    s.blocks      = p.blocks;
    s.block_size  = p.block_size;
    s.p_in        = p.p_in;
    s.p_out       = p.p_out;
    s.feature_dim = p.feature_dim;
    s.separation  = p.separation;
    s.overlap     = p.overlap;
    s.seed        = p.seed;
    if (p.name != nullptr)
    {
      s.name = p.name;
    }
    auto b = unicom::sbm_generate(s);
    if (p.queries_per_community > 0)
    {
      unicom::QuerySamplerOptions q;
      q.per_community = p.queries_per_community;
      q.seed          = p.seed;
      b.queries       = unicom::sample_queries(b, q);
    }
    *out = new unicom_bundle{std::move(b)};
  });
}

unicom_status unicom_queries_load(char const *path, unicom_bundle const *bundle, unicom_queries **out)
{
  return guarded([&] {
    require_out(out);
    auto const n = deref(bundle, "bundle").value.graph.num_nodes();
    *out         = new unicom_queries{unicom::load_queries(require_path(path, "query file"), n)};
  });
}

unicom_status unicom_queries_from_bundle(unicom_bundle const *bundle, unicom_queries **out)
{
  return guarded([&] {
    require_out(out);
    *out = new unicom_queries{deref(bundle, "bundle").value.queries};
  });
}

size_t unicom_queries_count(unicom_queries const *queries)
{
  return queries ? queries->value.size() : 0;
}

void unicom_queries_free(unicom_queries *queries)
{
  delete queries;
}

unicom_status unicom_preprocess(unicom_config const *config, unicom_bundle const *bundle,
                                char const *out_dir)
{
  return guarded([&] {
    auto const &c = deref(config, "config").value;
    auto const &b = deref(bundle, "bundle").value;
    c.validate();
    unicom::save_preprocessed(unicom::preprocess(b.graph, c.preprocess_config(), b.communities),
                              require_path(out_dir, "output directory"));
  });
}

unicom_status unicom_pretrain(unicom_config const *config, unicom_bundle const *source,
                              char const *checkpoint_dir)
{
  return guarded([&] {
    auto const &c = deref(config, "config").value;
    auto const &b = deref(source, "bundle").value;
    c.validate();
    auto ckpt        = unicom::pretrain(b.graph, c.ugl_config(), b.communities);
    ckpt.source_name = b.name;
    unicom::save_checkpoint(ckpt, require_path(checkpoint_dir, "checkpoint directory"));
  });
}

unicom_status unicom_adapt(unicom_config const *config, unicom_task task,
                           char const *const *checkpoints, size_t n_checkpoints,
                           unicom_bundle const *target, size_t communities)
{
  return guarded([&] {
    unicom::adapt_experts(deref(config, "config").value, to_task(task), paths(checkpoints, n_checkpoints),
                          deref(target, "bundle").value, communities);
  });
}

unicom_status unicom_search(unicom_config const *config, char const *const *checkpoints,
                            size_t n_checkpoints, unicom_bundle const *target,
                            unicom_queries const *queries, size_t r, char const *dump_dir,
                            unicom_result **out)
{
  return guarded([&] {
    require_out(out);
    auto res = unicom::search(deref(config, "config").value, paths(checkpoints, n_checkpoints),
                              deref(target, "bundle").value, deref(queries, "queries").value, r,
                              optional_path(dump_dir));
    *out     = new unicom_result{std::move(res)};
  });
}

unicom_status unicom_detect(unicom_config const *config, char const *const *checkpoints,
                            size_t n_checkpoints, unicom_bundle const *target, size_t communities,
                            int overlap, double threshold, char const *dump_dir, unicom_result **out)
{
  return guarded([&] {
    require_out(out);
    auto res = unicom::detect(deref(config, "config").value, paths(checkpoints, n_checkpoints),
                              deref(target, "bundle").value, communities, overlap != 0, threshold,
                              optional_path(dump_dir));
    *out     = new unicom_result{std::move(res)};
  });
}

unicom_status unicom_fuse(char const *const *expert_dirs, size_t n_dirs, size_t r, size_t communities,
                          double threshold, uint64_t seed, unicom_result **out)
{
  return guarded([&] {
    require_out(out);
    std::vector<unicom::ExpertDump> dumps;
    for (auto const &dir : paths(expert_dirs, n_dirs))
    {
      dumps.push_back(unicom::load_expert_dump(dir));
    }
    *out = new unicom_result{unicom::fuse_dumps(dumps, r, communities, threshold, seed)};
  });
}

unicom_status unicom_result_load(unicom_task task, char const *path, unicom_bundle const *bundle,
                                 unicom_result **out)
{
  return guarded([&] {
    require_out(out);
    auto const n = deref(bundle, "bundle").value.graph.num_nodes();
    *out = new unicom_result{unicom::load_result(to_task(task), require_path(path, "result file"), n)};
  });
}

unicom_status unicom_result_save(unicom_result const *result, char const *path)
{
  return guarded([&] { unicom::save_result(deref(result, "result").value, require_path(path, "result file")); });
}

unicom_task unicom_result_task(unicom_result const *result)
{
  return result ? from_task(result->value.task) : UNICOM_TASK_CS;
}

void unicom_result_free(unicom_result *result)
{
  delete result;
}

unicom_status unicom_evaluate(char const *metric, unicom_result const *result,
                              unicom_bundle const *truth, unicom_queries const *queries, double *out)
{
  return guarded([&] {
    if (out == nullptr)
    {
      throw unicom::InvalidArgument("output pointer is null");
    }
    auto const &b  = deref(truth, "bundle").value;
    auto const &qs = queries ? queries->value : b.queries;
    *out = unicom::evaluate(require_path(metric, "metric"), deref(result, "result").value, b, qs);
  });
}

}  // extern "C"
