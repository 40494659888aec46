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

#ifndef UNICOM_UNICOM_H
#define UNICOM_UNICOM_H

/* C interface of the unicom library. Every object is an opaque handle owned by
 * the caller and released with its _free function. Functions that can fail
 * return a unicom_status; the message of the last failure on the calling
 * thread is available from unicom_last_error(). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define UNICOM_API __declspec(dllexport)
#else
#define UNICOM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum unicom_status
{
  UNICOM_OK           = 0,
  UNICOM_ERR_INTERNAL = 1,
  UNICOM_ERR_INVALID  = 2, /* bad arguments, malformed or unreadable files */
  UNICOM_ERR_NUMERIC  = 3  /* non-finite values during training */
} unicom_status;

typedef enum unicom_task
{
  UNICOM_TASK_CS  = 0,
  UNICOM_TASK_DCD = 1,
  UNICOM_TASK_OCD = 2
} unicom_task;

typedef struct unicom_config  unicom_config;
typedef struct unicom_bundle  unicom_bundle;
typedef struct unicom_queries unicom_queries;
typedef struct unicom_result  unicom_result;

UNICOM_API const char *unicom_version(void);
UNICOM_API const char *unicom_last_error(void);

typedef void (*unicom_warning_fn)(const char *message);
/* NULL restores the default handler, which writes to stderr. */
UNICOM_API void unicom_set_warning_handler(unicom_warning_fn fn);

UNICOM_API unicom_status unicom_task_parse(const char *name, unicom_task *out);

/* ---- configuration ------------------------------------------------------ */
UNICOM_API unicom_status unicom_config_default(unicom_config **out);
UNICOM_API unicom_status unicom_config_load(const char *path, unicom_config **out);
UNICOM_API unicom_status unicom_config_set_seed(unicom_config *config, uint64_t seed);
UNICOM_API unicom_status unicom_config_set_threads(unicom_config *config, size_t threads);
UNICOM_API double        unicom_config_threshold(const unicom_config *config);
UNICOM_API void          unicom_config_free(unicom_config *config);

/* ---- datasets ----------------------------------------------------------- */
UNICOM_API unicom_status unicom_bundle_load(const char *dir, unicom_bundle **out);
UNICOM_API unicom_status unicom_bundle_save(const unicom_bundle *bundle, const char *dir);
UNICOM_API size_t        unicom_bundle_num_nodes(const unicom_bundle *bundle);
UNICOM_API size_t        unicom_bundle_num_edges(const unicom_bundle *bundle);
UNICOM_API size_t        unicom_bundle_communities(const unicom_bundle *bundle);
UNICOM_API void          unicom_bundle_free(unicom_bundle *bundle);

typedef struct unicom_sbm_params
{
  size_t      blocks;
  size_t      block_size;
  double      p_in;
  double      p_out;
  size_t      feature_dim;
  double      separation;
  double      overlap;               /* fraction of nodes with a second block */
  size_t      queries_per_community; /* 0 writes no queries */
  uint64_t    seed;
  const char *name;
} unicom_sbm_params;

UNICOM_API void          unicom_sbm_params_default(unicom_sbm_params *params);
UNICOM_API unicom_status unicom_sbm_generate(const unicom_sbm_params *params, unicom_bundle **out);

UNICOM_API unicom_status unicom_queries_load(const char *path, const unicom_bundle *bundle,
                                             unicom_queries **out);
UNICOM_API unicom_status unicom_queries_from_bundle(const unicom_bundle *bundle, unicom_queries **out);
UNICOM_API size_t        unicom_queries_count(const unicom_queries *queries);
UNICOM_API void          unicom_queries_free(unicom_queries *queries);

/* ---- pipeline ----------------------------------------------------------- */
UNICOM_API unicom_status unicom_preprocess(const unicom_config *config, const unicom_bundle *bundle,
                                           const char *out_dir);
UNICOM_API unicom_status unicom_pretrain(const unicom_config *config, const unicom_bundle *source,
                                         const char *checkpoint_dir);
/* communities: 0 uses the count recorded in the bundle; ignored for cs. */
UNICOM_API unicom_status unicom_adapt(const unicom_config *config, unicom_task task,
                                      const char *const *checkpoints, size_t n_checkpoints,
                                      const unicom_bundle *target, size_t communities);
/* dump_dir may be NULL; otherwise per-expert outputs go to dump_dir/expert<i>. */
UNICOM_API unicom_status unicom_search(const unicom_config *config, const char *const *checkpoints,
                                       size_t n_checkpoints, const unicom_bundle *target,
                                       const unicom_queries *queries, size_t r,
                                       const char *dump_dir, unicom_result **out);
UNICOM_API unicom_status unicom_detect(const unicom_config *config, const char *const *checkpoints,
                                       size_t n_checkpoints, const unicom_bundle *target,
                                       size_t communities, int overlap, double threshold,
                                       const char *dump_dir, unicom_result **out);
UNICOM_API unicom_status unicom_fuse(const char *const *expert_dirs, size_t n_dirs, size_t r,
                                     size_t communities, double threshold, uint64_t seed,
                                     unicom_result **out);

/* ---- results and metrics ------------------------------------------------ */
UNICOM_API unicom_status unicom_result_load(unicom_task task, const char *path,
                                            const unicom_bundle *bundle, unicom_result **out);
UNICOM_API unicom_status unicom_result_save(const unicom_result *result, const char *path);
UNICOM_API unicom_task   unicom_result_task(const unicom_result *result);
UNICOM_API void          unicom_result_free(unicom_result *result);

/* metric: f1, jac, nmi, onmi, or, mla. queries may be NULL to use the bundle's. */
UNICOM_API unicom_status unicom_evaluate(const char *metric, const unicom_result *result,
                                         const unicom_bundle *truth, const unicom_queries *queries,
                                         double *out);

#ifdef __cplusplus
}
#endif

#endif /* UNICOM_UNICOM_H */
