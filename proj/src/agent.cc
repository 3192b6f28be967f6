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

#include "forge/agent.h"

#include <map>

namespace forge {

Session::Session(const AgentRuntime& rt, std::string id, uint64_t seed)
    : rt_(rt), id_(std::move(id)), rng_(seed) {
  agent_turn();
  opening_ = last_reply_;
}

void Session::agent_turn() {
  AgentChoice choice = select_agent(rt_.machine, rt_.policy, r_, rng_);
  last_reply_ = render_agent(rt_.machine, rt_.grammar, rt_.db, r_, choice, rng_);
  a_ = std::move(choice.state);
}

Context Session::user_context() const { return ended_ ? r_ : attach_agent_state(r_, a_); }

StepResult Session::step(std::string_view utterance) {
  if (ended_) throw Error(ErrorKind::kState, "session " + id_ + " has ended");
  const Context uctx = user_context();
  StepResult out;
  out.user_state = rt_.parser.parse(uctx, utterance);

  DialogueTurn turn{r_, a_, out.user_state, {}};
  if (out.user_state.act == UserAct::kInvalid) {
    // Nothing runs; the agent asks again in the same state.
    ++invalid_turns_;
    ++consecutive_invalid_;
    turn.r_next = r_;
    turn.r_next.last_act = LastAct::user(UserAct::kInvalid);
    history_.push_back(turn);
    r_ = turn.r_next;
    out.reply = std::string(kClarification) + " " + last_reply_;
    out.agent_state = a_;
    out.context = user_context();
    return out;
  }
  consecutive_invalid_ = 0;

  DatabaseExecutor exec(rt_.db, rng_, rt_.config.mode, rt_.config.p_fail);
  AdvanceOptions opts;
  opts.confirm_actions = rt_.config.confirm_actions;
  turn.r_next = agent_facing(
      advance_context(uctx, out.user_state, exec, rt_.machine.schemas(), opts));
  history_.push_back(turn);
  r_ = turn.r_next;

  if (out.user_state.act == UserAct::kEnd) {
    ended_ = true;
    out.ended = true;
    out.reply = std::string(kGoodbye);
    out.context = user_context();
    return out;
  }
  agent_turn();
  out.reply = last_reply_;
  out.agent_state = a_;
  out.context = user_context();
  return out;
}

namespace {

double cooperative_weight(const std::string& tag, bool done) {
  if (done) {
    if (tag == "end") return 20;
    if (tag == "acknowledge") return 4;
    return 0.5;
  }
  static const std::map<std::string, double> kWeights = {
      {"accept_proposal", 10}, {"accept_proposal_params", 8}, {"fill_slot", 10},
      {"request_action", 8},   {"change_param", 6},           {"answer_slot", 6},
      {"select_entity", 6},    {"change_slot", 4},            {"exec_new_query", 4},
      {"exec_new_action", 4},  {"answer_dontcare", 3},        {"ask_about_entity", 3},
      {"ask_recommend", 3},    {"insist", 2},                 {"refine_query", 2}};
  auto it = kWeights.find(tag);
  if (it != kWeights.end()) return it->second;
  if (tag == "cancel" || tag == "reject_proposal" || tag == "end" || tag == "switch_domain") {
    return 0.2;
  }
  return 1;
}

}  // namespace

Episode simulate_episode(const AgentRuntime& rt, const Lexicon& lex, uint64_t seed,
                         const SimulatorConfig& cfg) {
  Session s(rt, "sim", seed);
  Rng rng(mix_seed(seed, 1));
  Episode ep;
  ep.transcript.push_back("A: " + s.opening());
  while (!s.ended() && ep.turns < cfg.max_turns) {
    const Context uctx = s.user_context();
    auto options = enumerate_user_transitions(rt.machine, uctx, s.agent_state());
    std::optional<UserTurn> turn;
    std::string tag;
    while (!options.empty() && !turn) {
      std::vector<double> w;
      double total = 0;
      for (const auto* t : options) {
        w.push_back(cfg.cooperative ? cooperative_weight(t->tag, ep.action_success) : 1.0);
        total += w.back();
      }
      double x = rng.uniform() * total;
      size_t k = 0;
      while (k + 1 < options.size() && (x -= w[k]) >= 0) ++k;
      turn = sample_user_turn(rt.machine, rt.grammar, rt.db, lex, uctx, *options[k], rng);
      if (turn) {
        tag = options[k]->tag;
      } else {
        options.erase(options.begin() + static_cast<long>(k));
      }
    }
    if (!turn) {
      turn = sample_user_turn(rt.machine, rt.grammar, rt.db, lex, uctx,
                              *rt.machine.user_transition("end"), rng);
      tag = "end";
      if (!turn) turn = UserTurn{"bye", {}, UserState{UserAct::kEnd, {}}};
    }
    ep.user_tags.push_back(tag);
    ep.accepted_proposal =
        ep.accepted_proposal || tag == "accept_proposal" || tag == "accept_proposal_params";
    ep.transcript.push_back("U: " + turn->utterance);
    StepResult r = s.step(turn->utterance);
    ++ep.turns;
    ep.parse_mismatch = ep.parse_mismatch || !states_equal(r.user_state, turn->state);
    ep.transcript.push_back("A: " + r.reply);
    if (r.agent_state && r.agent_state->act == AgentAct::kActionSuccess) ep.action_success = true;
  }
  ep.user_ended = s.ended();
  return ep;
}

}  // namespace forge
