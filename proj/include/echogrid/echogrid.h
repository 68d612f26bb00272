// Copyright 2026 The echogrid Authors
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

#ifndef ECHOGRID_H
#define ECHOGRID_H

/* C interface to the echogrid library.
 *
 * Every function returns an echogrid_status. On failure the message for the
 * calling thread is available from echogrid_last_error() until the next
 * call. Strings handed out through char** parameters are owned by the caller
 * and released with echogrid_string_free. Handles are released with their
 * matching *_free function; passing NULL to a free function is a no-op.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(ECHOGRID_BUILDING_LIBRARY)
#define ECHOGRID_API __attribute__((visibility("default")))
#else
#define ECHOGRID_API
#endif

typedef enum echogrid_status {
  ECHOGRID_OK = 0,
  ECHOGRID_ERR_ARGUMENT = 1, /* NULL or malformed argument */
  ECHOGRID_ERR_USAGE = 2,    /* well-formed but unusable option values */
  ECHOGRID_ERR_CONFIG = 3,
  ECHOGRID_ERR_IO = 4,
  ECHOGRID_ERR_FORMAT = 5,
  ECHOGRID_ERR_RANGE = 6,
  ECHOGRID_ERR_BACKEND = 7,
  ECHOGRID_ERR_INTERNAL = 8
} echogrid_status;

typedef struct echogrid_world echogrid_world;
typedef struct echogrid_trajectory_log echogrid_trajectory_log;

ECHOGRID_API const char* echogrid_version(void);
ECHOGRID_API const char* echogrid_last_error(void);
ECHOGRID_API const char* echogrid_status_name(echogrid_status status);
ECHOGRID_API void echogrid_string_free(char* s);

/* Worlds. */
ECHOGRID_API echogrid_status echogrid_world_generate(uint64_t seed, echogrid_world** out);
ECHOGRID_API echogrid_status echogrid_world_from_json(const char* json, echogrid_world** out);
ECHOGRID_API echogrid_status echogrid_world_to_json(const echogrid_world* world, char** out);
ECHOGRID_API echogrid_status echogrid_world_ascii(const echogrid_world* world, char** out);
/* Observation text followed by the action menus. */
ECHOGRID_API echogrid_status echogrid_world_observe(const echogrid_world* world, char** out);
/* `no_op` (optional) is set to 1 when the action was invalid. */
ECHOGRID_API echogrid_status echogrid_world_step(echogrid_world* world, int action, int* no_op);
ECHOGRID_API echogrid_status echogrid_world_reset(echogrid_world* world);
/* Shortest workflow for a goal such as "pick up the grey key"; `length`
 * (optional) receives the action count, or -1 when unreachable. */
ECHOGRID_API echogrid_status echogrid_world_plan(const echogrid_world* world, const char* goal, char** workflow,
                                                 int* length);
ECHOGRID_API void echogrid_world_free(echogrid_world* world);

/* Commands. Options are JSON objects; `report` receives human-readable text.
 *
 * gen:      {"seeds": [..], "out": dir, "force": bool, "verbose": bool}
 * run:      {"envs": dir, "strategy": id, "backend": id, "episodes": n,
 *            "horizon": n, "goal_seed": n, "workers": n, "out": dir,
 *            "resume_config": path, "force": bool}
 * eval:     {"runs": [dir..], "baseline": dir, "out": csv, "plot": svg}
 * validate: {"run": dir, "samples": n, "backend": id, "seed": n}
 */
ECHOGRID_API echogrid_status echogrid_gen(const char* options_json, char** report);
ECHOGRID_API echogrid_status echogrid_run(const char* options_json, char** report);
ECHOGRID_API echogrid_status echogrid_eval(const char* options_json, char** report);
ECHOGRID_API echogrid_status echogrid_validate(const char* options_json, char** report);

/* Trajectory logs (JSONL). */
ECHOGRID_API echogrid_status echogrid_trajectory_log_open(const char* path, echogrid_trajectory_log** out);
ECHOGRID_API echogrid_status echogrid_trajectory_log_count(const echogrid_trajectory_log* log, size_t* count);
/* Pretty text for one record; step < 0 prints every step. */
ECHOGRID_API echogrid_status echogrid_trajectory_log_format(const echogrid_trajectory_log* log, size_t index,
                                                            int step, char** out);
/* The record re-serialized as one JSONL line, without the newline. */
ECHOGRID_API echogrid_status echogrid_trajectory_log_record(const echogrid_trajectory_log* log, size_t index,
                                                            char** out);
ECHOGRID_API void echogrid_trajectory_log_free(echogrid_trajectory_log* log);

#ifdef __cplusplus
}
#endif

#endif /* ECHOGRID_H */
