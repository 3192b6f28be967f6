// Copyright 2026 The Forge Authors.
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

#include "forge/forge.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <optional>
#include <string>

#include "forge/agent.h"
#include "forge/engine.h"
#include "forge/eval.h"
#include "forge/linearize.h"
#include "forge/paraphrase_filter.h"
#include "forge/parser.h"
#include "forge/pipeline.h"
#include "forge/server.h"
#include "forge/state_machine.h"
#include "forge/synthesizer.h"
#include "json.hpp"

struct forge_env {
  forge::SchemaSet schemas;
  forge::Database db;
  forge::MachineSpec machine;
  forge::Grammar grammar;
  forge::Lexicon lexicon;
};

struct forge_parser {
  const forge_env* env = nullptr;
  std::unique_ptr<forge::ParserHandle> handle;
  const forge::GrammarParser* grammar = nullptr;  // set for the built-in parser
};

struct forge_agent {
  const forge_env* env;
  forge::AgentRuntime rt;
  std::unique_ptr<forge::ChatService> service;
};

struct forge_session {
  std::unique_ptr<forge::Session> session;
};

namespace {

thread_local std::string g_last_error;

forge_status status_of(forge::ErrorKind k) {
  switch (k) {
    case forge::ErrorKind::kIo: return FORGE_ERR_IO;
    case forge::ErrorKind::kParse: return FORGE_ERR_PARSE;
    case forge::ErrorKind::kValidation: return FORGE_ERR_VALIDATION;
    case forge::ErrorKind::kUsage: return FORGE_ERR_USAGE;
    case forge::ErrorKind::kState: return FORGE_ERR_STATE;
    case forge::ErrorKind::kNotFound: return FORGE_ERR_NOT_FOUND;
    case forge::ErrorKind::kInternal: return FORGE_ERR_INTERNAL;
  }
  return FORGE_ERR_INTERNAL;
}

template <typename F>
forge_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return FORGE_OK;
  } catch (const forge::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return FORGE_ERR_PARSE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FORGE_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return FORGE_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw forge::Error(forge::ErrorKind::kUsage, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void put(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

}  // namespace

extern "C" {

const char* forge_last_error(void) { return g_last_error.c_str(); }

const char* forge_status_name(forge_status s) {
  switch (s) {
    case FORGE_OK: return "ok";
    case FORGE_ERR_IO: return "io";
    case FORGE_ERR_PARSE: return "parse";
    case FORGE_ERR_VALIDATION: return "validation";
    case FORGE_ERR_USAGE: return "usage";
    case FORGE_ERR_STATE: return "state";
    case FORGE_ERR_NOT_FOUND: return "not_found";
    case FORGE_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void forge_string_free(char* s) { std::free(s); }

forge_status forge_env_open(const char* schemas_path, const char* db_path,
                            const char* templates_path, forge_env** out) {
  return guarded([&] {
    require(schemas_path && db_path && out, "schemas, db and out are required");
    auto env = std::make_unique<forge_env>();
    env->schemas = forge::load_schemas(schemas_path);
    env->db = forge::load_database(db_path, env->schemas);
    env->machine = forge::builtin_transaction_machine(env->schemas);
    env->grammar = forge::builtin_grammar(env->schemas);
    if (templates_path) forge::load_template_file(templates_path, env->schemas, env->grammar);
    env->grammar.validate();
    env->lexicon = forge::build_lexicon(env->db);
    *out = env.release();
  });
}

void forge_env_free(forge_env* env) { delete env; }

forge_status forge_machine_describe(const forge_env* env, char** out) {
  return guarded([&] {
    require(env && out, "env and out are required");
    put(out, forge::describe(env->machine));
  });
}

void forge_synth_config_default(forge_synth_config* cfg) {
  if (!cfg) return;
  const forge::SynthConfig d;
  cfg->num_dialogues = d.num_dialogues;
  cfg->working_set_size = d.working_set_size;
  cfg->max_turns = d.max_turns;
  cfg->seed = d.seed;
  cfg->p_fail = d.p_fail;
  cfg->confirm_rate = d.confirm_rate;
  cfg->temperature = d.temperature;
  cfg->workers = d.workers;
}

forge_status forge_synthesize(const forge_env* env, const forge_synth_config* cfg,
                              const char* out_dir, char** summary_json) {
  return guarded([&] {
    require(env && cfg && out_dir, "env, cfg and out_dir are required");
    require(cfg->working_set_size > 0, "working set size must be positive");
    require(cfg->p_fail >= 0 && cfg->p_fail <= 1, "p_fail must be in [0, 1]");
    require(cfg->confirm_rate >= 0 && cfg->confirm_rate <= 1, "confirm rate must be in [0, 1]");
    forge::SynthConfig c;
    c.num_dialogues = cfg->num_dialogues;
    c.working_set_size = cfg->working_set_size;
    c.max_turns = cfg->max_turns;
    c.seed = cfg->seed;
    c.p_fail = cfg->p_fail;
    c.confirm_rate = cfg->confirm_rate;
    c.temperature = cfg->temperature;
    c.workers = cfg->workers;
    forge::SynthInputs in{env->machine, env->grammar, env->db, env->lexicon};
    const forge::SynthSummary s = forge::synthesize_to_dir(in, c, out_dir);
    nlohmann::json j = {{"dialogues", s.dialogues},
                        {"turns", s.turns},
                        {"rules", s.rule_counts},
                        {"followups", s.followup_counts},
                        {"agent_acts", s.agent_act_counts}};
    put(summary_json, j.dump(2));
  });
}

forge_status forge_parser_grammar(const forge_env* env, forge_parser** out) {
  return guarded([&] {
    require(env && out, "env and out are required");
    auto p = std::make_unique<forge_parser>();
    p->env = env;
    auto g = std::make_unique<forge::GrammarParser>(env->machine, env->grammar, env->lexicon);
    p->grammar = g.get();
    p->handle = std::move(g);
    *out = p.release();
  });
}

forge_status forge_parser_external(const forge_env* env, const char* command,
                                   forge_parser** out) {
  return guarded([&] {
    require(env && command && out, "env, command and out are required");
    auto p = std::make_unique<forge_parser>();
    p->env = env;
    p->handle = std::make_unique<forge::ExternalParser>(command, env->schemas);
    *out = p.release();
  });
}

void forge_parser_free(forge_parser* p) { delete p; }

forge_status forge_parse(forge_parser* p, const char* context, const char* utterance,
                         char** target) {
  return guarded([&] {
    require(p && context && utterance && target, "all arguments are required");
    const forge::Context ctx = forge::delinearize_context(context, p->env->schemas);
    put(target, forge::linearize(p->handle->parse(ctx, utterance)));
  });
}

forge_status forge_predict(forge_parser* p, const char* gold_path, const char* out_path,
                           const char* dump_path, char** summary_json) {
  return guarded([&] {
    require(p && gold_path && out_path, "parser, gold and out are required");
    const forge::GrammarParser* dumper = dump_path ? p->grammar : nullptr;
    const forge::PredictSummary s = forge::predict_file(
        *p->handle, p->env->schemas, gold_path, out_path, dumper, dump_path ? dump_path : "");
    nlohmann::json j = {{"turns", s.turns}, {"matches", s.matches}, {"invalid", s.invalid}};
    put(summary_json, j.dump(2));
  });
}

forge_status forge_filter(forge_parser* p, const char* in_path, const char* out_path,
                          char** report_json) {
  return guarded([&] {
    require(p && in_path && out_path, "parser, in and out are required");
    std::ifstream in(in_path, std::ios::binary);
    if (!in) throw forge::Error(forge::ErrorKind::kIo, std::string("cannot read ") + in_path);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw forge::Error(forge::ErrorKind::kIo, std::string("cannot write ") + out_path);
    const forge::FilterReport r = forge::filter_paraphrases(in, out, *p->handle, p->env->schemas);
    out.flush();
    if (!out) throw forge::Error(forge::ErrorKind::kIo, std::string("write failed: ") + out_path);
    put(report_json, forge::filter_report_json(r));
  });
}

forge_status forge_evaluate(const forge_env* env, const char* gold_path, const char* pred_path,
                            const char* signature_path, char** report_json) {
  return guarded([&] {
    require(env && gold_path && pred_path, "env, gold and pred are required");
    const auto records = forge::load_eval_records(gold_path, pred_path);
    std::optional<forge::Signature> sig;
    if (signature_path) sig = forge::load_signature(signature_path);
    std::optional<forge::Categorizer> cat;
    if (sig) cat.emplace(forge::Categorizer{env->machine, env->grammar, env->db, *sig});
    const forge::MetricsReport r =
        forge::evaluate(records, env->schemas, cat ? &*cat : nullptr);
    put(report_json, forge::report_json(r));
  });
}

void forge_agent_config_default(forge_agent_config* cfg) {
  if (!cfg) return;
  cfg->simulate = 0;
  cfg->p_fail = 0.0;
  cfg->confirm_actions = 0;
}

forge_status forge_agent_new(const forge_env* env, forge_parser* parser,
                             const forge_agent_config* cfg, forge_agent** out) {
  return guarded([&] {
    require(env && parser && out, "env, parser and out are required");
    forge::AgentConfig c;
    if (cfg) {
      c.mode = cfg->simulate ? forge::ExecMode::kSimulate : forge::ExecMode::kLive;
      c.p_fail = cfg->p_fail;
      c.confirm_actions = cfg->confirm_actions != 0;
    }
    auto* a = new forge_agent{env,
                              forge::AgentRuntime{env->machine, env->grammar, env->db,
                                                  *parser->handle,
                                                  forge::default_policy(env->machine), c},
                              nullptr};
    a->service = std::make_unique<forge::ChatService>(a->rt);
    *out = a;
  });
}

void forge_agent_free(forge_agent* agent) { delete agent; }

forge_status forge_session_new(forge_agent* agent, uint64_t seed, forge_session** out,
                               char** opening_json) {
  return guarded([&] {
    require(agent && out, "agent and out are required");
    auto s = std::make_unique<forge_session>();
    s->session = std::make_unique<forge::Session>(agent->rt, "local", seed);
    put(opening_json, forge::session_state_json(*s->session));
    *out = s.release();
  });
}

forge_status forge_session_step(forge_session* s, const char* text, char** result_json) {
  return guarded([&] {
    require(s && text, "session and text are required");
    const forge::StepResult r = s->session->step(text);
    put(result_json, forge::step_result_json(*s->session, r));
  });
}

void forge_session_free(forge_session* s) { delete s; }

forge_status forge_simulate(forge_agent* agent, uint64_t episodes, uint64_t seed,
                            uint64_t max_turns, char** summary_json) {
  return guarded([&] {
    require(agent, "agent is required");
    forge::SimulatorConfig cfg;
    cfg.max_turns = max_turns;
    uint64_t turns = 0, ended = 0, accepted = 0, succeeded = 0, mismatched = 0;
    for (uint64_t i = 0; i < episodes; ++i) {
      const forge::Episode ep =
          forge::simulate_episode(agent->rt, agent->env->lexicon, forge::mix_seed(seed, i), cfg);
      turns += ep.turns;
      ended += ep.user_ended;
      mismatched += ep.parse_mismatch;
      if (ep.accepted_proposal) {
        ++accepted;
        succeeded += ep.action_success;
      }
    }
    nlohmann::json j = {{"episodes", episodes},
                        {"turns", turns},
                        {"ended_by_user", ended},
                        {"hit_max_turns", episodes - ended},
                        {"accepted_proposal", accepted},
                        {"reached_action_success", succeeded},
                        {"parse_mismatch", mismatched}};
    put(summary_json, j.dump(2));
  });
}

forge_status forge_serve(forge_agent* agent, const char* host, int port,
                         const char* static_dir) {
  return guarded([&] {
    require(agent && host, "agent and host are required");
    require(port > 0 && port < 65536, "port must be in 1..65535");
    forge::ServerConfig cfg;
    cfg.host = host;
    cfg.port = port;
    if (static_dir) cfg.static_dir = static_dir;
    forge::run_server(*agent->service, cfg);
  });
}

}  // extern "C"
