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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any failed. Usage: forge_acceptance <path-to-forge-cli>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "forge/eval.h"
#include "forge/linearize.h"
#include "forge/synthesizer.h"
#include "json.hpp"
#include "oracle.h"
#include "world.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace forge;
using namespace forge::testing;

namespace {

std::string g_cli;
fs::path g_work;

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail.clear();
    pass = false;
    detail += (detail.empty() ? "" : "; ") + why;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

std::string env_flags() {
  return " --schemas " + quote(data("schemas.json")) + " --db " + quote(data("db.json"));
}

// Runs a shell command; stdout goes to a log unless the command redirects it.
int sh(std::string cmd) {
  if (cmd.find(" > ") == std::string::npos) cmd += " >> " + quote((g_work / "cli.log").string());
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::vector<json> read_jsonl(const fs::path& p) {
  std::vector<json> out;
  for (const auto& line : read_lines(p.string())) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

std::string fmt(double x) {
  std::ostringstream o;
  o.precision(4);
  o << x;
  return o.str();
}

// 1. Synthesize, predict and evaluate through the CLI.
Outcome round_trip() {
  Outcome o;
  const fs::path dir = g_work / "c1";
  const auto t0 = std::chrono::steady_clock::now();
  if (sh(g_cli + " synthesize" + env_flags() + " --num 1000 --seed 42 --workers 1 --out " +
         quote(dir.string())) != 0) {
    o.fail("synthesize failed");
    return o;
  }
  if (sh(g_cli + " predict --parser grammar" + env_flags() + " --gold " +
         quote((dir / "user.jsonl").string()) + " --out " + quote((dir / "pred.jsonl").string()) +
         " --dump " + quote((dir / "dump.jsonl").string())) != 0) {
    o.fail("predict failed");
    return o;
  }
  if (sh(g_cli + " evaluate" + env_flags() + " --gold " + quote((dir / "user.jsonl").string()) +
         " --pred " + quote((dir / "pred.jsonl").string()) + " --report " +
         quote((dir / "report.json").string())) != 0) {
    o.fail("evaluate failed");
    return o;
  }
  const double secs = seconds_since(t0);
  const json report = json::parse(read_file((dir / "report.json").string()));
  const double em = report.at("turn_em");
  const uint64_t turns = report.at("turns");
  const uint64_t dialogues = report.at("dialogues");
  const size_t dumped = read_lines((dir / "dump.jsonl").string()).size();
  const auto missed = static_cast<uint64_t>(turns - static_cast<uint64_t>(em * turns + 0.5));
  o.detail = std::to_string(dialogues) + " dialogues, " + std::to_string(turns) +
             " turns, turn EM " + fmt(em) + ", " + std::to_string(dumped) + " dumped, " +
             fmt(secs) + " s";
  if (dialogues != 1000) o.fail("expected 1000 dialogues");
  if (em < 0.99) o.fail("turn EM " + fmt(em) + " < 0.99");
  if (dumped != missed) o.fail("dump has " + std::to_string(dumped) + " entries for " +
                               std::to_string(missed) + " misses");
  if (secs >= 120) o.fail("took " + fmt(secs) + " s");
  return o;
}

// Executed and pending statements per domain, read off the tokens of a
// context linearization. Quoted values are skipped.
struct TextCounts {
  std::map<std::string, int> queries, actions, pending;
};

TextCounts count_statements(const std::string& text) {
  std::vector<std::string> toks;
  std::istringstream in(text);
  std::string t;
  bool quoted = false;
  while (in >> t) {
    if (t == "\"") {
      quoted = !quoted;
      continue;
    }
    if (!quoted) toks.push_back(t);
  }
  TextCounts c;
  for (size_t i = 0; i < toks.size(); ++i) {
    const bool exec = toks[i] == "exec" || toks[i] == "exec_new";
    if (!exec && toks[i] != "pending") continue;
    // Head runs to "(": "domain", "slot of domain" or "domain . action".
    std::vector<std::string> head;
    for (size_t j = i + 1; j < toks.size() && toks[j] != "("; ++j) head.push_back(toks[j]);
    if (head.empty()) continue;
    const auto dot = std::find(head.begin(), head.end(), ".");
    if (!exec) {
      ++c.pending[head.front()];
    } else if (dot != head.end()) {
      ++c.actions[head.front()];
    } else {
      ++c.queries[head.back()];
    }
  }
  return c;
}

// 2. Every context in the corpus of (1).
Outcome context_sweep() {
  Outcome o;
  const World& w = full_world();
  const fs::path file = g_work / "c1" / "dialogues.jsonl";
  if (!fs::exists(file)) {
    o.fail("no corpus from criterion 1");
    return o;
  }
  uint64_t contexts = 0, bad = 0, statements = 0;
  std::string first_bad;
  for (const auto& d : read_jsonl(file)) {
    for (const auto& t : d.at("turns")) {
      for (const char* key : {"context", "user_context", "next_context"}) {
        const std::string text = t.at(key);
        ++contexts;
        std::vector<std::string> problems;
        Context c;
        try {
          c = delinearize_context(text, w.schemas);
        } catch (const Error& e) {
          problems.push_back(e.what());
        }
        if (problems.empty()) {
          problems = check_context(c, w.schemas);
          if (linearize(c) != text) problems.push_back("linearization does not round-trip");
          // Counted from the text itself, not the structured record.
          const TextCounts n = count_statements(text);
          for (const auto* m : {&n.queries, &n.actions, &n.pending}) {
            for (const auto& [domain, k] : *m) statements += k;
          }
          for (const auto& [domain, k] : n.queries) {
            if (k > 1) problems.push_back(domain + ": more than one executed query");
          }
          for (const auto& [domain, k] : n.actions) {
            if (k > 1) problems.push_back(domain + ": more than one executed action");
          }
          for (const auto& [domain, k] : n.pending) {
            if (k > 1) problems.push_back(domain + ": carryover deeper than 1");
          }
        }
        if (!problems.empty()) {
          ++bad;
          if (first_bad.empty()) first_bad = d.at("id").get<std::string>() + ": " + problems[0];
        }
      }
    }
  }
  o.detail = std::to_string(contexts) + " contexts holding " + std::to_string(statements) +
             " executed or pending statements, " + std::to_string(bad) + " violations";
  if (contexts == 0 || statements == 0) o.fail("nothing to check");
  if (bad) o.fail(first_bad);
  return o;
}

// 3. Random queries against a full-scan oracle.
Outcome executor_oracle() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const SchemaSet schemas = parse_schemas(kRandomSchema);
  Rng rng(20260);
  uint64_t queries = 0, mismatches = 0, grew = 0, members = 0;
  for (int table = 0; table < 100; ++table) {
    const Database db(schemas, {{"thing", random_rows(rng, 100)}});
    const auto& rows = db.rows("thing");
    for (int i = 0; i < 100; ++i, ++queries) {
      QueryStatement q;
      q.domain = "thing";
      const size_t n = rng.below(4);
      for (size_t k = 0; k < n; ++k) q.filter.push_back(random_atom(rng));
      const ExecResult got = execute_query(db, q);
      const OracleResult want = oracle_query(rows, q);
      bool same = got.count == want.count && !got.error &&
                  (want.count == 0 ? !got.first : (got.first && *got.first == *want.rows[0]));
      // Membership, row by row on a sample: pin the entity and ask again.
      std::set<const Row*> in(want.rows.begin(), want.rows.end());
      for (int k = 0; k < 5; ++k) {
        const Row& r = rows[rng.below(rows.size())];
        QueryStatement pinned = q;
        pinned.filter.push_back({"name", FilterOp::kEq, {r.at("name")}});
        ++members;
        same = same && (execute_query(db, pinned).count == 1) == (in.count(&r) == 1);
      }
      mismatches += !same;
      QueryStatement tighter = q;
      tighter.filter.push_back(random_atom(rng));
      grew += execute_query(db, tighter).count > got.count;
    }
  }
  const double secs = seconds_since(t0);
  o.detail = std::to_string(queries) + " queries, " + std::to_string(members) +
             " membership probes, " + std::to_string(mismatches) + " mismatches, " +
             std::to_string(grew) + " monotonicity violations, " + fmt(secs) + " s";
  if (mismatches) o.fail(std::to_string(mismatches) + " oracle mismatches");
  if (grew) o.fail(std::to_string(grew) + " monotonicity violations");
  if (secs >= 10) o.fail("took " + fmt(secs) + " s");
  return o;
}

// 4. Hand-computed metrics and order invariants under fuzzing.
Outcome metrics() {
  Outcome o;
  const World& w = full_world();
  const std::string indian = "Exec: restaurant ( food = \" indian \" ) ;";
  const std::string chinese = "Exec: restaurant ( food = \" chinese \" ) ;";
  const std::string hotel = "Exec: hotel ( area = \" north \" ) ;";
  auto rec = [](std::string id, uint64_t turn, std::string gold, std::string pred) {
    return EvalRecord{std::move(id), turn, "", "", std::move(gold), std::move(pred)};
  };
  std::vector<EvalRecord> single = {rec("a", 0, indian, indian), rec("a", 1, hotel, chinese),
                                    rec("a", 2, indian, indian), rec("a", 3, hotel, hotel)};
  MetricsReport r = evaluate(single, w.schemas);
  if (r.turn_em != 0.75) o.fail("single-error turn EM " + fmt(r.turn_em));
  if (r.dialogue_em != 0.25) o.fail("single-error dialogue EM " + fmt(r.dialogue_em));
  // Two dialogues, six turns, four exact.
  std::vector<EvalRecord> two = {rec("a", 0, indian, indian), rec("a", 1, hotel, hotel),
                                 rec("a", 2, chinese, indian), rec("b", 0, hotel, chinese),
                                 rec("b", 1, indian, indian), rec("b", 2, chinese, chinese)};
  r = evaluate(two, w.schemas);
  if (r.turn_em != 4.0 / 6) o.fail("two-dialogue turn EM " + fmt(r.turn_em));
  if (r.dialogue_em != 2.0 / 6) o.fail("two-dialogue dialogue EM " + fmt(r.dialogue_em));
  if (r.whole_dialogue_em != 0.0) o.fail("two-dialogue whole EM " + fmt(r.whole_dialogue_em));

  // Fuzzed prediction files over a synthesized gold set.
  std::vector<EvalRecord> gold;
  SynthConfig cfg;
  cfg.num_dialogues = 40;
  cfg.seed = 77;
  std::vector<std::string> targets;
  synthesize({w.machine, w.grammar, w.db, w.lexicon}, cfg, [&](const DialogueRecord& d) {
    for (const auto& t : d.turns) {
      const std::string s = linearize(t.user_state);
      gold.push_back({d.id, t.turn, linearize(t.user_context), t.user_utterance, s, s});
      targets.push_back(s);
    }
  });
  Rng rng(4);
  uint64_t violations = 0;
  for (int file = 0; file < 1000; ++file) {
    std::vector<EvalRecord> preds = gold;
    const double p = rng.uniform();
    for (auto& x : preds) {
      if (!rng.chance(p)) continue;
      switch (rng.below(4)) {
        case 0: x.pred = rng.pick(targets); break;
        case 1: x.pred = "Invalid:"; break;
        case 2: x.pred = x.pred.substr(0, rng.below(x.pred.size() + 1)); break;
        default: {
          // Same slots, different projection or act where possible.
          const std::string::size_type at = x.pred.find(':');
          x.pred = "Insist" + x.pred.substr(at == std::string::npos ? 0 : at);
        }
      }
    }
    const MetricsReport m = evaluate(preds, w.schemas);
    const bool ordered = m.dialogue_em <= m.turn_em && m.turn_em <= m.turn_slot &&
                         m.dialogue_slot <= m.turn_slot && m.whole_dialogue_em <= 1.0;
    violations += !ordered;
  }
  o.detail = "goldens 0.75/0.25 and 4/6 checked; 1000 fuzzed files over " +
             std::to_string(gold.size()) + " turns, " + std::to_string(violations) +
             " order violations";
  if (violations) o.fail(std::to_string(violations) + " order violations");
  return o;
}

// 5. Rule and act coverage at scale, and the audit doc.
Outcome coverage() {
  Outcome o;
  const World& w = full_world();
  SynthConfig cfg;
  cfg.num_dialogues = 10000;
  cfg.seed = 1;
  std::map<std::string, uint64_t> rules;
  std::set<AgentAct> acts;
  synthesize({w.machine, w.grammar, w.db, w.lexicon}, cfg, [&](const DialogueRecord& d) {
    for (const auto& t : d.turns) {
      ++rules[t.agent_rule];
      acts.insert(t.agent_state.act);
    }
  });
  std::vector<std::string> missing;
  for (const auto& r : w.machine.rules()) {
    if (!rules.count(r.name)) missing.push_back("rule " + r.name);
  }
  for (int a = 0; a < kNumAgentActs; ++a) {
    const auto act = static_cast<AgentAct>(a);
    if (act != AgentAct::kInvalid && !acts.count(act)) {
      missing.push_back("act " + std::string(agent_act_name(act)));
    }
  }
  if (!missing.empty()) o.fail("never exercised: " + join(missing, ", "));

  const fs::path out = g_work / "describe.txt";
  if (sh(g_cli + " machine --describe" + env_flags() + " > " + quote(out.string())) != 0) {
    o.fail("machine --describe failed");
    return o;
  }
  const std::string described = read_file(out.string());
  const std::string doc_path = std::string(FORGE_DOCS_DIR) + "/machine.md";
  if (!fs::exists(doc_path)) {
    o.fail("audit doc missing");
    return o;
  }
  const std::string doc = read_file(doc_path);
  size_t lines = 0, absent = 0;
  std::istringstream in(described);
  std::string line;
  while (std::getline(in, line)) {
    ++lines;
    if (doc.find(line) == std::string::npos) {
      if (!absent++) o.fail("audit doc lacks: " + line);
    }
  }
  size_t hit = 0;
  for (const auto& r : w.machine.rules()) hit += rules.count(r.name);
  o.detail = std::to_string(hit) + "/" + std::to_string(w.machine.num_agent_rules()) +
             " rules and " +
             std::to_string(acts.size()) + " acts exercised over 10000 dialogues; " +
             std::to_string(lines - absent) + "/" + std::to_string(lines) +
             " describe lines found in the audit doc";
  return o;
}

// 6. Byte-identical corpora and chat transcripts.
Outcome determinism() {
  Outcome o;
  std::vector<fs::path> dirs = {g_work / "c6a", g_work / "c6b"};
  for (size_t i = 0; i < dirs.size(); ++i) {
    // Different worker counts on purpose: the output must not depend on them.
    if (sh(g_cli + " synthesize" + env_flags() + " --num 1000 --seed 42 --workers " +
           std::to_string(1 + 3 * i) + " --out " + quote(dirs[i].string())) != 0) {
      o.fail("synthesize failed");
      return o;
    }
  }
  size_t files = 0;
  for (const char* f : {"user.jsonl", "agent.jsonl", "dialogues.jsonl", "signature.json"}) {
    ++files;
    if (read_file((dirs[0] / f).string()) != read_file((dirs[1] / f).string())) {
      o.fail(std::string(f) + " differs");
    }
  }
  if (read_file((dirs[0] / "user.jsonl").string()) !=
      read_file((g_work / "c1" / "user.jsonl").string())) {
    o.fail("user.jsonl differs from criterion 1 run");
  }

  const fs::path script = g_work / "chat_script.txt";
  {
    std::ofstream s(script);
    s << "hello\ni am looking for a cheap restaurant\nasdfgh\nindian\n"
         "what do you recommend\nyes\nfriday\n4 people\nat 18:00\nthanks\nbye\n";
  }
  std::vector<std::string> transcripts;
  for (int i = 0; i < 2; ++i) {
    const fs::path out = g_work / ("chat" + std::to_string(i) + ".txt");
    if (sh(g_cli + " chat --debug --simulate --p-fail 0.3 --seed 7" + env_flags() + " < " +
           quote(script.string()) + " > " + quote(out.string())) != 0) {
      o.fail("chat failed");
      return o;
    }
    transcripts.push_back(read_file(out.string()));
  }
  if (transcripts[0] != transcripts[1]) o.fail("chat transcripts differ");
  if (transcripts[0].find("agent>") == std::string::npos) o.fail("empty chat transcript");
  if (o.pass) {
    o.detail = std::to_string(files) + " corpus files identical across runs and worker counts; " +
               "chat replay identical (" + std::to_string(transcripts[0].size()) + " bytes)";
  }
  return o;
}

// 7. Scripted users against the live agent.
Outcome liveness() {
  Outcome o;
  const fs::path out = g_work / "simulate.json";
  if (sh(g_cli + " simulate --episodes 500 --seed 1 --max-turns 30" + env_flags() +
         " --report " + quote(out.string())) != 0) {
    o.fail("simulate failed");
    return o;
  }
  const json s = json::parse(read_file(out.string()));
  const uint64_t episodes = s.at("episodes"), ended = s.at("ended_by_user"),
                 capped = s.at("hit_max_turns"), accepted = s.at("accepted_proposal"),
                 succeeded = s.at("reached_action_success");
  const double rate = accepted ? static_cast<double>(succeeded) / accepted : 0.0;
  o.detail = std::to_string(episodes) + " episodes, " + std::to_string(ended) +
             " ended by the user, " + std::to_string(capped) + " hit the turn cap, " +
             std::to_string(succeeded) + "/" + std::to_string(accepted) +
             " accepted proposals reached ActionSuccess";
  if (episodes != 500) o.fail("expected 500 episodes");
  if (ended + capped != episodes) o.fail("episodes unaccounted for");
  if (accepted == 0) o.fail("no episode accepted a proposal");
  if (rate < 0.95) o.fail("success rate " + fmt(rate) + " < 0.95");
  return o;
}

// 8. Filter conservation and idempotence.
Outcome filter() {
  Outcome o;
  const World& w = full_world();
  SynthConfig cfg;
  cfg.num_dialogues = 120;
  cfg.seed = 5;
  std::vector<TurnRecord> turns;
  synthesize({w.machine, w.grammar, w.db, w.lexicon}, cfg, [&](const DialogueRecord& d) {
    for (const auto& t : d.turns) turns.push_back(t);
  });
  Rng rng(8);
  std::vector<std::string> lines;
  std::set<std::string> must_keep;
  uint64_t identity = 0, variants = 0, corrupted = 0, foreign = 0;
  auto line_for = [](size_t id, const TurnRecord& t, const std::string& paraphrase) {
    return json{{"id", "p" + std::to_string(id)},
                {"context", linearize(t.user_context)},
                {"gold_target", linearize(t.user_state)},
                {"paraphrase", paraphrase},
                {"tag", t.user_tag}}
        .dump();
  };
  while (lines.size() < 1000) {
    const TurnRecord& t = turns[rng.below(turns.size())];
    const size_t id = lines.size();
    switch (rng.below(4)) {
      case 0: {
        lines.push_back(line_for(id, t, t.user_utterance));
        must_keep.insert(lines.back());
        ++identity;
        break;
      }
      case 1: {
        // Another rendering of the same state from the templates.
        const UserTransition* tr = w.machine.user_transition(t.user_tag);
        std::optional<std::string> alt;
        for (int k = 0; k < 30 && tr && !alt; ++k) {
          auto u = sample_user_turn(w.machine, w.grammar, w.db, w.lexicon, t.user_context, *tr,
                                    rng);
          if (u && states_equal(u->state, t.user_state) && u->utterance != t.user_utterance) {
            alt = u->utterance;
          }
        }
        if (!alt) continue;
        lines.push_back(line_for(id, t, *alt));
        must_keep.insert(lines.back());
        ++variants;
        break;
      }
      case 2: {
        const TurnRecord& other = turns[rng.below(turns.size())];
        lines.push_back(line_for(id, t, other.user_utterance));
        ++foreign;
        break;
      }
      default: {
        std::string l = line_for(id, t, t.user_utterance);
        switch (rng.below(3)) {
          case 0: l = l.substr(0, l.size() / 2); break;
          case 1: l = json{{"id", "p" + std::to_string(id)}}.dump(); break;
          default: {
            json j = json::parse(l);
            j["gold_target"] = "Exec: nowhere ;";
            l = j.dump();
          }
        }
        lines.push_back(l);
        ++corrupted;
      }
    }
  }
  const fs::path in = g_work / "candidates.jsonl";
  {
    std::ofstream f(in);
    for (const auto& l : lines) f << l << "\n";
  }
  const fs::path k1 = g_work / "kept1.jsonl", k2 = g_work / "kept2.jsonl";
  const fs::path r1 = g_work / "filter1.json", r2 = g_work / "filter2.json";
  if (sh(g_cli + " filter" + env_flags() + " --in " + quote(in.string()) + " --out " +
         quote(k1.string()) + " --report " + quote(r1.string())) != 0 ||
      sh(g_cli + " filter" + env_flags() + " --in " + quote(k1.string()) + " --out " +
         quote(k2.string()) + " --report " + quote(r2.string())) != 0) {
    o.fail("filter failed");
    return o;
  }
  const json a = json::parse(read_file(r1.string()));
  const json b = json::parse(read_file(r2.string()));
  const uint64_t input = a.at("input"), kept = a.at("kept"), discarded = a.at("discarded"),
                 malformed = a.at("malformed");
  if (input != 1000) o.fail("input " + std::to_string(input));
  if (kept + discarded + malformed != input) o.fail("counts do not add up");
  if (malformed != corrupted) {
    o.fail(std::to_string(malformed) + " malformed for " + std::to_string(corrupted) +
           " corrupted lines");
  }
  const auto kept_lines = read_lines(k1.string());
  if (kept_lines.size() != kept) o.fail("kept file size differs from report");
  const std::set<std::string> kept_set(kept_lines.begin(), kept_lines.end());
  uint64_t lost = 0;
  for (const auto& l : must_keep) lost += !kept_set.count(l);
  if (lost) o.fail(std::to_string(lost) + " identity or template-variant lines dropped");
  if (read_file(k2.string()) != read_file(k1.string())) o.fail("second pass changed the file");
  if (b.at("kept") != kept || b.at("discarded") != 0 || b.at("malformed") != 0) {
    o.fail("second pass report differs");
  }
  o.detail = "1000 lines (" + std::to_string(identity) + " identity, " +
             std::to_string(variants) + " template variants, " + std::to_string(foreign) +
             " mismatched, " + std::to_string(corrupted) + " corrupted): kept " +
             std::to_string(kept) + ", discarded " + std::to_string(discarded) +
             ", malformed " + std::to_string(malformed) + "; second pass identical";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: forge_acceptance <forge-cli>\n";
    return 2;
  }
  g_cli = quote(argv[1]);
  g_work = fs::temp_directory_path() / "forge_acceptance";
  fs::remove_all(g_work);
  fs::create_directories(g_work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"round-trip inversion", round_trip},  {"context invariants", context_sweep},
      {"executor oracle", executor_oracle},  {"metrics goldens", metrics},
      {"machine coverage", coverage},        {"determinism", determinism},
      {"dialogue-loop liveness", liveness},  {"filter conservation", filter},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << " ("
              << criteria[i].first << "): " << o.detail << std::endl;
  }
  fs::remove_all(g_work);
  return failed ? 1 : 0;
}
