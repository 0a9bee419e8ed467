// Copyright 2026 The PINE Embed Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the PINE embedding engine.
 *
 * Objects are opaque handles created by pine_*_new / *_load / pine_train and
 * released with the matching *_free. Every fallible call returns a
 * pine_status; on failure pine_last_error() holds a message for the calling
 * thread until its next failing call. Handles are not synchronized: a handle
 * may be read from several threads but must not be freed concurrently. */
#ifndef PINE_PINE_H_
#define PINE_PINE_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(PINE_BUILDING_LIBRARY)
#define PINE_API __attribute__((visibility("default")))
#else
#define PINE_API
#endif

typedef enum pine_status {
  PINE_OK = 0,
  PINE_ERR_INVALID_ARGUMENT = 1,
  PINE_ERR_PARSE = 2,
  PINE_ERR_IO = 3,
  PINE_ERR_NUMERIC = 4,
  PINE_ERR_STATE = 5,
  PINE_ERR_CHECK_FAILED = 6,
  PINE_ERR_INTERNAL = 7
} pine_status;

typedef enum pine_label_mode {
  PINE_MULTICLASS = 0,
  PINE_MULTILABEL = 1
} pine_label_mode;

typedef struct pine_graph pine_graph;
typedef struct pine_labels pine_labels;
typedef struct pine_config pine_config;
typedef struct pine_model pine_model;

/* Receives one line of progress or report text. */
typedef void (*pine_line_fn)(const char* line, void* user);

PINE_API const char* pine_version(void);
PINE_API const char* pine_last_error(void);
PINE_API const char* pine_status_name(pine_status status);

/* Graphs. type_path may be NULL for a single-type graph. Self-loops dropped
 * during loading are reported as warnings on the handle. */
PINE_API pine_status pine_graph_load(const char* edge_path,
                                     const char* type_path, pine_graph** out);
PINE_API pine_status pine_graph_planted(int communities, int community_size,
                                        double p_in, double p_out,
                                        uint64_t seed, pine_graph** graph,
                                        pine_labels** labels);
PINE_API pine_status pine_graph_save(const pine_graph* graph,
                                     const char* edge_path,
                                     const char* type_path);
PINE_API size_t pine_graph_node_count(const pine_graph* graph);
PINE_API size_t pine_graph_edge_count(const pine_graph* graph);
PINE_API int pine_graph_type_count(const pine_graph* graph);
PINE_API size_t pine_graph_warning_count(const pine_graph* graph);
PINE_API const char* pine_graph_warning(const pine_graph* graph, size_t index);
PINE_API void pine_graph_free(pine_graph* graph);

/* Labels. */
PINE_API pine_status pine_labels_load(const char* path, const pine_graph* graph,
                                      pine_label_mode mode, pine_labels** out);
PINE_API pine_status pine_labels_save(const pine_labels* labels,
                                      const pine_graph* graph,
                                      const char* path);
PINE_API int pine_labels_class_count(const pine_labels* labels);
PINE_API size_t pine_labels_labeled_count(const pine_labels* labels);
PINE_API pine_label_mode pine_labels_mode(const pine_labels* labels);
PINE_API void pine_labels_free(pine_labels* labels);

/* Training configuration: "key = value" overrides on top of the defaults
 * for the graph's type count and label mode. Later settings win. */
PINE_API pine_config* pine_config_new(void);
PINE_API pine_status pine_config_set(pine_config* config, const char* key,
                                     const char* value);
PINE_API pine_status pine_config_load_file(pine_config* config,
                                           const char* path);
/* Writes the resolved configuration as "key = value" lines into buf
 * (NUL-terminated, truncated to capacity); *needed gets the full length. */
PINE_API pine_status pine_config_describe(const pine_config* config,
                                          int num_types, pine_label_mode mode,
                                          char* buf, size_t capacity,
                                          size_t* needed);
PINE_API void pine_config_free(pine_config* config);

/* Trains on graph. With labels, labeled_ratio of the labeled nodes is
 * sampled for supervision and the rest is kept as the test set; labels may
 * be NULL for an unsupervised run, in which case the ratio is ignored. */
PINE_API pine_status pine_train(const pine_config* config,
                                const pine_graph* graph,
                                const pine_labels* labels,
                                double labeled_ratio, pine_model** out);
/* Metric ("accuracy", "macro_f1", "micro_f1") on the held-out test nodes of
 * a freshly trained model. */
PINE_API pine_status pine_model_evaluate(const pine_model* model,
                                         const pine_labels* labels,
                                         const char* metric, double* value);
PINE_API pine_status pine_model_save(const pine_model* model, const char* path);
PINE_API pine_status pine_model_load(const char* path, pine_model** out);
PINE_API pine_status pine_model_write_history(const pine_model* model,
                                              const char* path);
PINE_API size_t pine_model_node_count(const pine_model* model);
PINE_API int pine_model_dim(const pine_model* model);
PINE_API pine_status pine_model_embedding(const pine_model* model, size_t node,
                                          double* out, size_t length);
/* Embedding TSV for the graph the model was trained on; labels optional. */
PINE_API pine_status pine_model_export(const pine_model* model,
                                       const pine_graph* graph,
                                       const pine_labels* labels,
                                       const char* path);
PINE_API void pine_model_free(pine_model* model);

/* Label-ratio sweep; writes csv_path and csv_path + ".config". */
PINE_API pine_status pine_sweep(const pine_config* config,
                                const pine_graph* graph,
                                const pine_labels* labels,
                                const double* ratios, size_t ratio_count,
                                int repeats, const char* dataset,
                                const char* csv_path, pine_line_fn progress,
                                void* user);

/* Randomized property checks; one "PASS ..." / "FAIL ..." line per property
 * goes to sink. Returns PINE_ERR_CHECK_FAILED when any property fails. */
PINE_API pine_status pine_self_check(int trials, uint64_t seed,
                                     int corrupt_symmetry, pine_line_fn sink,
                                     void* user);

#ifdef __cplusplus
}
#endif

#endif /* PINE_PINE_H_ */
