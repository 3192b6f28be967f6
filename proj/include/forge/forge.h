/* Copyright 2026 The Forge Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to libforge. Handles are opaque; every call returns a status
 * and leaves a thread-local message for forge_last_error(). Strings returned
 * through char** out-parameters are owned by the caller and released with
 * forge_string_free(). Structured results are JSON. */

#ifndef FORGE_FORGE_H_
#define FORGE_FORGE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(FORGE_BUILDING_LIBRARY)
#define FORGE_API __attribute__((visibility("default")))
#else
#define FORGE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  FORGE_OK = 0,
  FORGE_ERR_IO = 1,
  FORGE_ERR_PARSE = 2,
  FORGE_ERR_VALIDATION = 3,
  FORGE_ERR_USAGE = 4,
  FORGE_ERR_STATE = 5,
  FORGE_ERR_NOT_FOUND = 6,
  FORGE_ERR_INTERNAL = 7
} forge_status;

/* Schemas, database, machine, grammar and lexicon. Immutable once open. */
typedef struct forge_env forge_env;
typedef struct forge_parser forge_parser;
typedef struct forge_agent forge_agent;
typedef struct forge_session forge_session;

FORGE_API const char* forge_last_error(void);
FORGE_API const char* forge_status_name(forge_status s);
FORGE_API void forge_string_free(char* s);

/* templates_path may be NULL; otherwise its productions are added to the
 * built-in grammar. */
FORGE_API forge_status forge_env_open(const char* schemas_path, const char* db_path,
                                      const char* templates_path, forge_env** out);
FORGE_API void forge_env_free(forge_env* env);

/* "agent rules: N" / "user transitions: M" / "edges: E" then one line per
 * rule and transition. */
FORGE_API forge_status forge_machine_describe(const forge_env* env, char** out);

typedef struct {
  uint64_t num_dialogues;
  uint64_t working_set_size;
  uint64_t max_turns;
  uint64_t seed;
  double p_fail;
  double confirm_rate;
  double temperature;
  unsigned workers;
} forge_synth_config;

FORGE_API void forge_synth_config_default(forge_synth_config* cfg);
/* Writes user.jsonl, agent.jsonl, dialogues.jsonl and signature.json. */
FORGE_API forge_status forge_synthesize(const forge_env* env, const forge_synth_config* cfg,
                                        const char* out_dir, char** summary_json);

FORGE_API forge_status forge_parser_grammar(const forge_env* env, forge_parser** out);
/* Spawns `command` via /bin/sh; JSON lines {"context","utterance"} ->
 * {"target"}. */
FORGE_API forge_status forge_parser_external(const forge_env* env, const char* command,
                                             forge_parser** out);
FORGE_API void forge_parser_free(forge_parser* p);

/* context is a user-facing context linearization ("" for the null context).
 * Writes the linearized user state. */
FORGE_API forge_status forge_parse(forge_parser* p, const char* context, const char* utterance,
                                   char** target);

/* dump_path may be NULL. With a grammar parser, mispredicted turns are
 * written there with their ranked derivations. */
FORGE_API forge_status forge_predict(forge_parser* p, const char* gold_path,
                                     const char* out_path, const char* dump_path,
                                     char** summary_json);

FORGE_API forge_status forge_filter(forge_parser* p, const char* in_path, const char* out_path,
                                    char** report_json);

/* signature_path may be NULL (no category table). */
FORGE_API forge_status forge_evaluate(const forge_env* env, const char* gold_path,
                                      const char* pred_path, const char* signature_path,
                                      char** report_json);

typedef struct {
  int simulate;          /* 0: live execution, 1: simulated failures */
  double p_fail;         /* with simulate */
  int confirm_actions;   /* hold complete actions for a confirmation */
} forge_agent_config;

FORGE_API void forge_agent_config_default(forge_agent_config* cfg);
/* The agent keeps references to env and parser; free it first. */
FORGE_API forge_status forge_agent_new(const forge_env* env, forge_parser* parser,
                                       const forge_agent_config* cfg, forge_agent** out);
FORGE_API void forge_agent_free(forge_agent* agent);

/* opening_json: {"session_id","reply","agent_state","context",...}. */
FORGE_API forge_status forge_session_new(forge_agent* agent, uint64_t seed,
                                         forge_session** out, char** opening_json);
/* {"reply","agent_state","user_state","context","ended"}. FORGE_ERR_STATE
 * once the session has ended. */
FORGE_API forge_status forge_session_step(forge_session* s, const char* text,
                                          char** result_json);
FORGE_API void forge_session_free(forge_session* s);

/* Runs scripted-user episodes through full sessions; summary JSON. */
FORGE_API forge_status forge_simulate(forge_agent* agent, uint64_t episodes, uint64_t seed,
                                      uint64_t max_turns, char** summary_json);

/* Blocks serving the chat API (and static_dir at "/" if not NULL). */
FORGE_API forge_status forge_serve(forge_agent* agent, const char* host, int port,
                                   const char* static_dir);

#ifdef __cplusplus
}
#endif

#endif /* FORGE_FORGE_H_ */
