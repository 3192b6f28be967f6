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

#include "forge/paraphrase_filter.h"

#include <istream>
#include <ostream>

#include "forge/linearize.h"
#include "json.hpp"

namespace forge {

Verdict judge_candidate(const std::string& line, ParserHandle& parser, const SchemaSet& schemas,
                        std::string* tag) {
  Context ctx;
  UserState gold;
  std::string paraphrase;
  try {
    auto j = nlohmann::json::parse(line);
    if (!j.is_object() || !j.contains("id")) return Verdict::kMalformed;
    if (tag) *tag = j.contains("tag") && j["tag"].is_string() ? j["tag"].get<std::string>() : "";
    ctx = delinearize_context(j.at("context").get<std::string>(), schemas);
    gold = delinearize_user(j.at("gold_target").get<std::string>(), schemas);
    paraphrase = j.at("paraphrase").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    return Verdict::kMalformed;
  } catch (const Error&) {
    return Verdict::kMalformed;
  }
  const UserState pred = parser.parse(ctx, paraphrase);
  return states_equal(pred, gold) ? Verdict::kKept : Verdict::kDiscarded;
}

FilterReport filter_paraphrases(std::istream& in, std::ostream& kept, ParserHandle& parser,
                                const SchemaSet& schemas) {
  FilterReport r;
  std::string line;
  while (std::getline(in, line)) {
    ++r.input;
    std::string tag;
    const Verdict v = judge_candidate(line, parser, schemas, &tag);
    if (v == Verdict::kMalformed) {
      ++r.malformed;
      continue;
    }
    FilterCounts& c = r.per_tag[tag.empty() ? "untagged" : tag];
    if (v == Verdict::kKept) {
      ++r.kept;
      ++c.kept;
      kept << line << '\n';
    } else {
      ++r.discarded;
      ++c.discarded;
    }
  }
  return r;
}

std::string filter_report_json(const FilterReport& r) {
  nlohmann::json tags = nlohmann::json::object();
  for (const auto& [tag, c] : r.per_tag) tags[tag] = {{"kept", c.kept}, {"discarded", c.discarded}};
  nlohmann::json j = {{"input", r.input},
                      {"kept", r.kept},
                      {"discarded", r.discarded},
                      {"malformed", r.malformed},
                      {"per_tag", tags}};
  return j.dump(2);
}

}  // namespace forge
