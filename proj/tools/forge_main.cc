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

// forge: command-line front end over the C API.
// Exit codes: 0 ok, 1 failure, 2 usage.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "forge/forge.h"
#include "json.hpp"

namespace {

struct Failure {
  int code;
};

int exit_code(forge_status s) { return s == FORGE_ERR_USAGE ? 2 : 1; }

void check(forge_status s) {
  if (s == FORGE_OK) return;
  std::cerr << "forge: " << forge_status_name(s) << " error: " << forge_last_error() << "\n";
  throw Failure{exit_code(s)};
}

// Owns a string handed out by the library.
std::string take(char* s) {
  std::string out = s ? s : "";
  forge_string_free(s);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text << "\n")) {
    std::cerr << "forge: io error: cannot write " << path << "\n";
    throw Failure{1};
  }
}

using EnvPtr = std::unique_ptr<forge_env, decltype(&forge_env_free)>;
using ParserPtr = std::unique_ptr<forge_parser, decltype(&forge_parser_free)>;
using AgentPtr = std::unique_ptr<forge_agent, decltype(&forge_agent_free)>;

struct EnvFlags {
  std::string schemas;
  std::string db;
  std::string templates;

  void add(CLI::App* cmd) {
    cmd->add_option("--schemas", schemas, "domain schema JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("--db", db, "database JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("--templates", templates, "extra template productions (JSON or JSONL)")
        ->check(CLI::ExistingFile);
  }

  EnvPtr open() const {
    forge_env* env = nullptr;
    check(forge_env_open(schemas.c_str(), db.c_str(),
                         templates.empty() ? nullptr : templates.c_str(), &env));
    return EnvPtr(env, forge_env_free);
  }
};

struct ParserFlags {
  std::string kind = "grammar";
  std::string command;

  void add(CLI::App* cmd) {
    auto* k = cmd->add_option("--parser", kind, "built-in parser")
                  ->check(CLI::IsMember({"grammar"}));
    cmd->add_option("--parser-cmd", command,
                    "external parser: JSON lines {context, utterance} -> {target}")
        ->excludes(k);
  }

  ParserPtr open(const forge_env* env) const {
    forge_parser* p = nullptr;
    if (command.empty()) {
      check(forge_parser_grammar(env, &p));
    } else {
      check(forge_parser_external(env, command.c_str(), &p));
    }
    return ParserPtr(p, forge_parser_free);
  }
};

struct AgentFlags {
  bool simulate = false;
  double p_fail = 0.0;
  bool confirm = false;

  void add(CLI::App* cmd) {
    cmd->add_flag("--simulate", simulate, "simulated execution with random failures");
    cmd->add_option("--p-fail", p_fail, "failure rate with --simulate")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_flag("--confirm", confirm, "ask before running complete actions");
  }

  AgentPtr open(const forge_env* env, forge_parser* parser) const {
    forge_agent_config cfg;
    forge_agent_config_default(&cfg);
    cfg.simulate = simulate;
    cfg.p_fail = p_fail;
    cfg.confirm_actions = confirm;
    forge_agent* a = nullptr;
    check(forge_agent_new(env, parser, &cfg, &a));
    return AgentPtr(a, forge_agent_free);
  }
};

std::string json_field(const std::string& json, const char* key) {
  auto j = nlohmann::json::parse(json);
  const auto& v = j.at(key);
  return v.is_string() ? v.get<std::string>() : v.dump();
}

int run_chat(forge_agent* agent, uint64_t seed, bool debug) {
  forge_session* s = nullptr;
  char* opening = nullptr;
  check(forge_session_new(agent, seed, &s, &opening));
  std::unique_ptr<forge_session, decltype(&forge_session_free)> guard(s, forge_session_free);
  const std::string open = take(opening);
  std::cout << "agent> " << json_field(open, "reply") << "\n";
  if (debug) std::cout << "  agent_state: " << json_field(open, "agent_state") << "\n";
  std::string line;
  while (std::cout << "user> " << std::flush, std::getline(std::cin, line)) {
    if (line.empty()) continue;
    char* out = nullptr;
    check(forge_session_step(s, line.c_str(), &out));
    const std::string r = take(out);
    std::cout << "agent> " << json_field(r, "reply") << "\n";
    if (debug) {
      std::cout << "  user_state: " << json_field(r, "user_state") << "\n"
                << "  agent_state: " << json_field(r, "agent_state") << "\n"
                << "  context: " << json_field(r, "context") << "\n";
    }
    if (json_field(r, "ended") == "true") break;
  }
  return 0;
}

// Line protocol used by --parser-cmd, served by the built-in parser.
int run_parse_stdio(forge_parser* p) {
  std::string line;
  while (std::getline(std::cin, line)) {
    nlohmann::json reply;
    auto req = nlohmann::json::parse(line, nullptr, false);
    if (req.is_discarded() || !req.is_object() || !req.contains("utterance")) {
      reply = {{"target", "Invalid:"}, {"error", "bad request"}};
    } else {
      char* target = nullptr;
      const std::string ctx = req.value("context", "");
      const std::string utt = req["utterance"].is_string() ? req["utterance"].get<std::string>() : "";
      if (forge_parse(p, ctx.c_str(), utt.c_str(), &target) == FORGE_OK) {
        reply = {{"target", take(target)}};
      } else {
        reply = {{"target", "Invalid:"}, {"error", forge_last_error()}};
      }
    }
    std::cout << reply.dump() << "\n" << std::flush;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forge: state-machine dialogue synthesis, parsing and evaluation"};
  app.require_subcommand(1);

  // synthesize
  auto* synth = app.add_subcommand("synthesize", "generate an annotated dialogue corpus");
  EnvFlags synth_env;
  synth_env.add(synth);
  forge_synth_config scfg;
  forge_synth_config_default(&scfg);
  std::string synth_out;
  synth->add_option("--num", scfg.num_dialogues, "number of dialogues")->required();
  synth->add_option("--seed", scfg.seed, "random seed")->required();
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--working-set", scfg.working_set_size, "partial dialogues kept in flight")
      ->check(CLI::PositiveNumber);
  synth->add_option("--max-turns", scfg.max_turns, "turn limit per dialogue")
      ->check(CLI::PositiveNumber);
  synth->add_option("--p-fail", scfg.p_fail, "simulated action failure rate")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--confirm-rate", scfg.confirm_rate, "share of dialogues confirming actions")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--temperature", scfg.temperature, "rank weighting; 0 is uniform");
  synth->add_option("--workers", scfg.workers, "worker threads")->check(CLI::PositiveNumber);

  // filter
  auto* filter = app.add_subcommand("filter", "keep paraphrases that parse to the gold state");
  EnvFlags filter_env;
  filter_env.add(filter);
  ParserFlags filter_parser;
  filter_parser.add(filter);
  std::string filter_in, filter_out, filter_report;
  filter->add_option("--in", filter_in, "candidate JSONL")->required()->check(CLI::ExistingFile);
  filter->add_option("--out", filter_out, "kept JSONL")->required();
  filter->add_option("--report", filter_report, "report JSON")->required();

  // predict
  auto* predict = app.add_subcommand("predict", "parse every turn of a user-turn file");
  EnvFlags predict_env;
  predict_env.add(predict);
  ParserFlags predict_parser;
  predict_parser.add(predict);
  std::string predict_gold, predict_out, predict_dump;
  predict->add_option("--gold", predict_gold, "user-turn JSONL")->required()->check(CLI::ExistingFile);
  predict->add_option("--out", predict_out, "prediction JSONL")->required();
  predict->add_option("--dump", predict_dump, "derivation dump for mispredicted turns");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "turn and dialogue metrics");
  EnvFlags eval_env;
  eval_env.add(evaluate);
  std::string eval_gold, eval_pred, eval_sig, eval_report, eval_machine = "builtin";
  evaluate->add_option("--gold", eval_gold, "gold JSONL")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--pred", eval_pred, "prediction JSONL")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--train-sig", eval_sig, "training signature for categories")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--machine", eval_machine, "state machine")->check(CLI::IsMember({"builtin"}));
  evaluate->add_option("--report", eval_report, "report JSON")->required();

  // chat
  auto* chat = app.add_subcommand("chat", "talk to the agent in the terminal");
  EnvFlags chat_env;
  chat_env.add(chat);
  ParserFlags chat_parser;
  chat_parser.add(chat);
  AgentFlags chat_agent;
  chat_agent.add(chat);
  uint64_t chat_seed = 0;
  bool chat_debug = false;
  chat->add_option("--seed", chat_seed, "session seed")->required();
  chat->add_flag("--debug", chat_debug, "print the formal states of every turn");

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP chat API");
  EnvFlags serve_env;
  serve_env.add(serve);
  ParserFlags serve_parser;
  serve_parser.add(serve);
  AgentFlags serve_agent;
  serve_agent.add(serve);
  std::string serve_host = "127.0.0.1", serve_static;
  int serve_port = 8080;
  serve->add_option("--host", serve_host, "bind address");
  serve->add_option("--port", serve_port, "port")->check(CLI::Range(1, 65535));
  serve->add_option("--static", serve_static, "directory served at /")->check(CLI::ExistingDirectory);

  // machine
  auto* machine = app.add_subcommand("machine", "inspect the state machine");
  EnvFlags machine_env;
  machine_env.add(machine);
  bool machine_describe = false;
  machine->add_flag("--describe", machine_describe, "list rules and followups")->required();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "scripted users talking to the live agent");
  EnvFlags sim_env;
  sim_env.add(simulate);
  AgentFlags sim_agent;
  sim_agent.add(simulate);
  uint64_t sim_episodes = 500, sim_seed = 0, sim_max_turns = 30;
  std::string sim_report;
  simulate->add_option("--episodes", sim_episodes, "number of episodes");
  simulate->add_option("--seed", sim_seed, "random seed")->required();
  simulate->add_option("--max-turns", sim_max_turns, "turn limit per episode")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--report", sim_report, "summary JSON (stdout if omitted)");

  // parse (hidden): the external-parser line protocol over stdin/stdout
  auto* parse = app.add_subcommand("parse", "");
  parse->group("");
  EnvFlags parse_env;
  parse_env.add(parse);
  bool parse_stdio = false;
  parse->add_flag("--stdio", parse_stdio, "serve JSON lines on stdin/stdout")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*synth) {
      EnvPtr env = synth_env.open();
      char* summary = nullptr;
      check(forge_synthesize(env.get(), &scfg, synth_out.c_str(), &summary));
      std::cout << take(summary) << "\n";
    } else if (*filter) {
      EnvPtr env = filter_env.open();
      ParserPtr p = filter_parser.open(env.get());
      char* report = nullptr;
      check(forge_filter(p.get(), filter_in.c_str(), filter_out.c_str(), &report));
      const std::string r = take(report);
      write_text(filter_report, r);
      std::cout << r << "\n";
    } else if (*predict) {
      EnvPtr env = predict_env.open();
      ParserPtr p = predict_parser.open(env.get());
      char* summary = nullptr;
      check(forge_predict(p.get(), predict_gold.c_str(), predict_out.c_str(),
                          predict_dump.empty() ? nullptr : predict_dump.c_str(), &summary));
      std::cout << take(summary) << "\n";
    } else if (*evaluate) {
      EnvPtr env = eval_env.open();
      char* report = nullptr;
      check(forge_evaluate(env.get(), eval_gold.c_str(), eval_pred.c_str(),
                           eval_sig.empty() ? nullptr : eval_sig.c_str(), &report));
      const std::string r = take(report);
      write_text(eval_report, r);
      std::cout << r << "\n";
    } else if (*chat) {
      EnvPtr env = chat_env.open();
      ParserPtr p = chat_parser.open(env.get());
      AgentPtr a = chat_agent.open(env.get(), p.get());
      return run_chat(a.get(), chat_seed, chat_debug);
    } else if (*serve) {
      EnvPtr env = serve_env.open();
      ParserPtr p = serve_parser.open(env.get());
      AgentPtr a = serve_agent.open(env.get(), p.get());
      check(forge_serve(a.get(), serve_host.c_str(), serve_port,
                        serve_static.empty() ? nullptr : serve_static.c_str()));
    } else if (*machine) {
      EnvPtr env = machine_env.open();
      char* text = nullptr;
      check(forge_machine_describe(env.get(), &text));
      std::cout << take(text);
    } else if (*simulate) {
      EnvPtr env = sim_env.open();
      ParserPtr p(nullptr, forge_parser_free);
      {
        forge_parser* raw = nullptr;
        check(forge_parser_grammar(env.get(), &raw));
        p.reset(raw);
      }
      AgentPtr a = sim_agent.open(env.get(), p.get());
      char* summary = nullptr;
      check(forge_simulate(a.get(), sim_episodes, sim_seed, sim_max_turns, &summary));
      const std::string r = take(summary);
      if (!sim_report.empty()) write_text(sim_report, r);
      std::cout << r << "\n";
    } else if (*parse) {
      EnvPtr env = parse_env.open();
      forge_parser* raw = nullptr;
      check(forge_parser_grammar(env.get(), &raw));
      ParserPtr p(raw, forge_parser_free);
      return run_parse_stdio(p.get());
    }
  } catch (const Failure& f) {
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "forge: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
