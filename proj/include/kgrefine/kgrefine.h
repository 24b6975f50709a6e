/*
   Copyright 2026 The kgrefine Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
 */

/* C interface to libkgrefine. Handles are opaque; every fallible call
   returns a kgr_status and leaves a message for kgr_last_error() on the
   calling thread. Strings returned through char** belong to the caller and
   are released with kgr_string_free(). */

#ifndef KGREFINE_KGREFINE_H_
#define KGREFINE_KGREFINE_H_

#include <stddef.h>

#if defined(_WIN32)
#define KGR_API __declspec(dllexport)
#else
#define KGR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kgr_status {
  KGR_OK = 0,
  KGR_ERR_CONFIG = 1,
  KGR_ERR_PARSE = 2,
  KGR_ERR_REFERENCE = 3,
  KGR_ERR_DATA = 4,
  KGR_ERR_NUMERIC = 5,
  KGR_ERR_CONTRACT = 6,
  KGR_ERR_IO = 7,
  KGR_ERR_INVALID_ARGUMENT = 8, /* null handle or pointer */
  KGR_ERR_INTERNAL = 9
} kgr_status;

typedef struct kgr_config kgr_config;
typedef struct kgr_kg kgr_kg;
typedef struct kgr_model kgr_model;

KGR_API const char* kgr_version(void);
/* Message of the last failed call on this thread; "" after success. */
KGR_API const char* kgr_last_error(void);
KGR_API const char* kgr_status_name(kgr_status status);
KGR_API void kgr_string_free(char* s);

/* ---- configuration ---- */

KGR_API kgr_status kgr_config_new(kgr_config** out);
KGR_API void kgr_config_free(kgr_config* config);
/* Merges a JSON file, then a JSON text, on top of the current values.
   Unknown keys and wrong types fail with KGR_ERR_CONFIG. */
KGR_API kgr_status kgr_config_merge_file(kgr_config* config, const char* path);
KGR_API kgr_status kgr_config_merge_json(kgr_config* config, const char* json_text);
KGR_API kgr_status kgr_config_to_json(const kgr_config* config, char** out);

/* ---- commands ---- */

/* Runs one of: prepare, infer, train, iterate, eval, ablate, heatmap.
   On success *summary receives a one-line JSON summary. */
KGR_API kgr_status kgr_run(const kgr_config* config, const char* command, char** summary);
/* Number of commands and the name at index i (NULL when out of range). */
KGR_API size_t kgr_command_count(void);
KGR_API const char* kgr_command_name(size_t i);

/* ---- knowledge graphs ---- */

/* Loads the command input named by the config (synthetic, files, or a
   KG directory). */
KGR_API kgr_status kgr_kg_load(const kgr_config* config, kgr_kg** out);
KGR_API void kgr_kg_free(kgr_kg* kg);
KGR_API size_t kgr_kg_num_facts(const kgr_kg* kg);
KGR_API size_t kgr_kg_num_entities(const kgr_kg* kg);
KGR_API size_t kgr_kg_num_relations(const kgr_kg* kg);
KGR_API size_t kgr_kg_num_labels(const kgr_kg* kg);

/* ---- models ---- */

KGR_API kgr_status kgr_model_load(const char* path, kgr_model** out);
KGR_API void kgr_model_free(kgr_model* model);
/* Probability for a named triple. Unknown names fail with
   KGR_ERR_REFERENCE. */
KGR_API kgr_status kgr_model_predict(const kgr_model* model, const char* subject, const char* relation,
                                     const char* object, double* out);

#ifdef __cplusplus
}
#endif

#endif /* KGREFINE_KGREFINE_H_ */
