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

#include "forge/synthesizer.h"

#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "forge/eval.h"
#include "forge/linearize.h"
#include "json.hpp"

namespace forge {

std::string dialogue_id(uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "d%06llu", static_cast<unsigned long long>(index));
  return buf;
}

namespace {

size_t weighted_pick(size_t n, double temperature, Rng& rng) {
  if (temperature <= 0) return rng.below(n);
  std::vector<double> w(n);
  double total = 0;
  for (size_t i = 0; i < n; ++i) total += (w[i] = std::exp(-static_cast<double>(i) / temperature));
  double x = rng.uniform() * total;
  for (size_t i = 0; i < n; ++i) {
    if ((x -= w[i]) < 0) return i;
  }
  return n - 1;
}

// One partial dialogue of the working set.
struct Partial {
  uint64_t index;
  Rng rng;
  AdvanceOptions opts;
  DialogueRecord record;
  Context ctx;
  bool done = false;
};

Partial start(const SynthConfig& cfg, uint64_t index) {
  Partial p{index, Rng(mix_seed(cfg.seed, index)), {}, {}, {}, false};
  p.opts.confirm_actions = p.rng.chance(cfg.confirm_rate);
  p.record.id = dialogue_id(index);
  p.record.confirm_actions = p.opts.confirm_actions;
  return p;
}

void step(const SynthInputs& in, const SynthConfig& cfg, Partial& p) {
  const MachineSpec& m = in.machine;
  Rng& rng = p.rng;
  TurnRecord t;
  t.turn = p.record.turns.size();
  t.context = p.ctx;

  auto rules = applicable_rules(m, p.ctx);
  AgentChoice choice;
  if (rules.empty()) {
    choice = select_agent(m, default_policy(m), p.ctx, rng);
  } else {
    const TransitionRule* r = rules[weighted_pick(rules.size(), cfg.temperature, rng)];
    choice = {r, r->agent_semantics(p.ctx, rng)};
  }
  t.agent_rule = choice.rule->name;
  t.agent_state = choice.state;
  t.agent_utterance = render_agent(m, in.grammar, in.db, p.ctx, choice, rng);
  t.user_context = attach_agent_state(p.ctx, choice.state);

  auto options = enumerate_user_transitions(m, t.user_context, choice.state);
  std::optional<UserTurn> turn;
  while (!options.empty() && !turn) {
    const size_t k = weighted_pick(options.size(), cfg.temperature, rng);
    turn = sample_user_turn(m, in.grammar, in.db, in.lexicon, t.user_context, *options[k], rng);
    if (turn) {
      t.user_tag = options[k]->tag;
    } else {
      options.erase(options.begin() + static_cast<long>(k));
    }
  }
  if (!turn) {
    // Nothing fits: close the dialogue.
    const UserTransition* end = m.user_transition("end");
    turn = sample_user_turn(m, in.grammar, in.db, in.lexicon, t.user_context, *end, rng);
    if (!turn) {
      turn = UserTurn{"bye", {}, UserState{UserAct::kEnd, {}}};
    }
    t.user_tag = "end";
  }
  t.user_utterance = turn->utterance;
  t.user_state = turn->state;

  DatabaseExecutor exec(in.db, rng, ExecMode::kSimulate, cfg.p_fail);
  t.next_context = advance_context(t.user_context, t.user_state, exec, m.schemas(), p.opts);
  p.ctx = t.next_context;
  const bool ended = t.user_state.act == UserAct::kEnd;
  p.record.turns.push_back(std::move(t));
  p.done = ended || p.record.turns.size() >= cfg.max_turns;
}

}  // namespace

DialogueRecord synthesize_dialogue(const SynthInputs& in, const SynthConfig& cfg,
                                   uint64_t index) {
  Partial p = start(cfg, index);
  while (!p.done) step(in, cfg, p);
  return std::move(p.record);
}

void synthesize(const SynthInputs& in, const SynthConfig& cfg,
                const std::function<void(const DialogueRecord&)>& emit) {
  const unsigned workers = std::max(1u, cfg.workers);
  const uint64_t per_worker_set =
      std::max<uint64_t>(1, cfg.working_set_size / workers);

  std::mutex mu;
  std::condition_variable cv;
  std::map<uint64_t, DialogueRecord> ready;
  uint64_t next_emit = 0;
  std::exception_ptr failure;

  // Worker w owns dialogue indices w, w + workers, ...
  auto work = [&](unsigned w) {
    try {
      uint64_t next_index = w;
      std::deque<Partial> set;
      auto refill = [&] {
        while (set.size() < per_worker_set && next_index < cfg.num_dialogues) {
          set.push_back(start(cfg, next_index));
          next_index += workers;
        }
      };
      refill();
      while (!set.empty()) {
        for (auto& p : set) step(in, cfg, p);
        for (auto it = set.begin(); it != set.end();) {
          if (!it->done) {
            ++it;
            continue;
          }
          {
            std::lock_guard<std::mutex> lock(mu);
            if (failure) return;
            ready.emplace(it->index, std::move(it->record));
          }
          cv.notify_all();
          it = set.erase(it);
        }
        refill();
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!failure) failure = std::current_exception();
      cv.notify_all();
    }
  };

  std::vector<std::thread> threads;
  for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w);
  {
    std::unique_lock<std::mutex> lock(mu);
    while (next_emit < cfg.num_dialogues) {
      cv.wait(lock, [&] { return failure || ready.count(next_emit); });
      if (failure) break;
      DialogueRecord rec = std::move(ready.at(next_emit));
      ready.erase(next_emit);
      ++next_emit;
      lock.unlock();
      cv.notify_all();
      emit(rec);
      lock.lock();
    }
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string dialogue_json(const DialogueRecord& d) {
  nlohmann::json turns = nlohmann::json::array();
  for (const auto& t : d.turns) {
    turns.push_back({{"turn", t.turn},
                     {"context", linearize(t.context)},
                     {"agent_rule", t.agent_rule},
                     {"agent_act", std::string(agent_act_name(t.agent_state.act))},
                     {"agent_utterance", t.agent_utterance},
                     {"agent_state", linearize(t.agent_state)},
                     {"user_context", linearize(t.user_context)},
                     {"user_tag", t.user_tag},
                     {"user_utterance", t.user_utterance},
                     {"user_state", linearize(t.user_state)},
                     {"next_context", linearize(t.next_context)}});
  }
  nlohmann::json j = {{"id", d.id}, {"confirm_actions", d.confirm_actions}, {"turns", turns}};
  return j.dump();
}

std::vector<std::string> user_lines(const DialogueRecord& d) {
  std::vector<std::string> out;
  for (const auto& t : d.turns) {
    nlohmann::json j = {{"id", d.id},
                        {"turn", t.turn},
                        {"context", linearize(t.user_context)},
                        {"utterance", t.user_utterance},
                        {"target", linearize(t.user_state)},
                        {"tag", t.user_tag}};
    out.push_back(j.dump());
  }
  return out;
}

std::vector<std::string> agent_lines(const DialogueRecord& d) {
  std::vector<std::string> out;
  for (const auto& t : d.turns) {
    nlohmann::json j = {{"id", d.id},
                        {"turn", t.turn},
                        {"context", linearize(t.context)},
                        {"utterance", t.agent_utterance},
                        {"target", linearize(t.agent_state)},
                        {"tag", t.agent_rule}};
    out.push_back(j.dump());
  }
  return out;
}

SynthSummary synthesize_to_dir(const SynthInputs& in, const SynthConfig& cfg,
                               const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + out_dir + ": " + ec.message());
  auto open = [&](const char* name) {
    std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
    if (!f) throw Error(ErrorKind::kIo, "cannot write " + (fs::path(out_dir) / name).string());
    return f;
  };
  std::ofstream user = open("user.jsonl");
  std::ofstream agent = open("agent.jsonl");
  std::ofstream dialogues = open("dialogues.jsonl");
  SynthSummary summary;
  Signature signature;
  synthesize(in, cfg, [&](const DialogueRecord& d) {
    ++summary.dialogues;
    for (const auto& line : user_lines(d)) user << line << '\n';
    for (const auto& line : agent_lines(d)) agent << line << '\n';
    dialogues << dialogue_json(d) << '\n';
    for (const auto& t : d.turns) {
      ++summary.turns;
      ++summary.rule_counts[t.agent_rule];
      ++summary.followup_counts[t.user_tag];
      ++summary.agent_act_counts[std::string(agent_act_name(t.agent_state.act))];
      signature.insert(abstract_shape(t.user_context, t.user_state));
    }
  });
  if (!user || !agent || !dialogues) throw Error(ErrorKind::kIo, "write failed in " + out_dir);
  save_signature(signature, (fs::path(out_dir) / "signature.json").string());
  return summary;
}

}  // namespace forge
