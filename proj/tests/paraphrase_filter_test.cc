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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "forge/paraphrase_filter.h"
#include "forge/synthesizer.h"
#include "json.hpp"
#include "world.h"

using namespace forge;
using namespace forge::testing;

namespace {

std::string candidate(const std::string& id, const std::string& ctx, const std::string& gold,
                      const std::string& paraphrase, const std::string& tag = "") {
  nlohmann::json j = {{"id", id}, {"context", ctx}, {"gold_target", gold},
                      {"paraphrase", paraphrase}};
  if (!tag.empty()) j["tag"] = tag;
  return j.dump();
}

const std::string kIndian = "Exec: restaurant ( food = \" indian \" ) ;";

}  // namespace

TEST_SUITE("paraphrase_filter") {
  TEST_CASE("verdicts") {
    const World& w = five_world();
    GrammarParser p(w.machine, w.grammar, w.lexicon);
    const std::string null_ctx = linearize(Context{});
    CHECK(judge_candidate(candidate("a", null_ctx, kIndian, "i am looking for indian food"), p,
                          w.schemas) == Verdict::kKept);
    CHECK(judge_candidate(candidate("a", null_ctx, kIndian, "i want food"), p, w.schemas) ==
          Verdict::kDiscarded);
    CHECK(judge_candidate(candidate("a", null_ctx, kIndian, "i am looking for chinese food"), p,
                          w.schemas) == Verdict::kDiscarded);
    CHECK(judge_candidate("{", p, w.schemas) == Verdict::kMalformed);
    CHECK(judge_candidate("[]", p, w.schemas) == Verdict::kMalformed);
    CHECK(judge_candidate(candidate("a", null_ctx, "Exec: nowhere ( x = \" y \" ) ;", "hi"), p,
                          w.schemas) == Verdict::kMalformed);
    std::string tag;
    judge_candidate(candidate("a", null_ctx, kIndian, "x", "exec_new_query"), p, w.schemas, &tag);
    CHECK(tag == "exec_new_query");
  }

  TEST_CASE("new templates admit new phrasings") {
    const World& w = five_world();
    Grammar g = w.grammar;
    const auto path = std::filesystem::temp_directory_path() / "forge_filter_templates.jsonl";
    {
      std::ofstream out(path);
      out << R"({"nonterminal": "USER_TURN", "parts": ["i want", {"value": "restaurant.food"}, "cuisine"], "tag": "exec_new_query", "params": {"domain": "restaurant"}})"
          << "\n";
    }
    load_template_file(path.string(), w.schemas, g);
    std::filesystem::remove(path);
    GrammarParser before(w.machine, w.grammar, w.lexicon);
    GrammarParser after(w.machine, g, w.lexicon);
    const std::string line =
        candidate("a", linearize(Context{}), kIndian, "i want indian cuisine");
    CHECK(judge_candidate(line, before, w.schemas) == Verdict::kDiscarded);
    CHECK(judge_candidate(line, after, w.schemas) == Verdict::kKept);
  }

  TEST_CASE("conservation and idempotence") {
    const World& w = five_world();
    GrammarParser p(w.machine, w.grammar, w.lexicon);
    std::ostringstream in;
    SynthConfig cfg;
    cfg.num_dialogues = 20;
    cfg.seed = 8;
    size_t n = 0;
    synthesize({w.machine, w.grammar, w.db, w.lexicon}, cfg, [&](const DialogueRecord& d) {
      for (const auto& t : d.turns) {
        const std::string id = d.id + "/" + std::to_string(t.turn);
        const std::string ctx = linearize(t.user_context);
        const std::string gold = linearize(t.user_state);
        in << candidate(id, ctx, gold, t.user_utterance, t.user_tag) << "\n";
        in << candidate(id + "b", ctx, gold, "zorp " + t.user_utterance, t.user_tag) << "\n";
        in << candidate(id + "c", ctx, gold, t.user_utterance) << "\n";
        n += 3;
      }
    });
    in << "not json\n";
    ++n;
    std::istringstream first_in(in.str());
    std::ostringstream first_out;
    const FilterReport r1 = filter_paraphrases(first_in, first_out, p, w.schemas);
    CHECK(r1.input == n);
    CHECK(r1.kept + r1.discarded + r1.malformed == r1.input);
    CHECK(r1.malformed == 1);
    CHECK(r1.kept == 2 * (n - 1) / 3);
    uint64_t tagged = 0;
    for (const auto& [tag, c] : r1.per_tag) tagged += c.kept + c.discarded;
    CHECK(tagged == r1.kept + r1.discarded);
    CHECK(r1.per_tag.count("untagged"));

    std::istringstream second_in(first_out.str());
    std::ostringstream second_out;
    const FilterReport r2 = filter_paraphrases(second_in, second_out, p, w.schemas);
    CHECK(second_out.str() == first_out.str());
    CHECK(r2.kept == r1.kept);
    CHECK(r2.discarded == 0);

    const auto j = nlohmann::json::parse(filter_report_json(r1));
    CHECK(j.at("kept").get<uint64_t>() == r1.kept);
    CHECK(j.at("per_tag").contains("untagged"));
  }
}
