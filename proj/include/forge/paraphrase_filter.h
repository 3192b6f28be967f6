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

// Keeps a paraphrase only if the parser maps it back to the gold state.
// Candidates are JSON lines {"id","context","paraphrase","gold_target"} with
// an optional "tag"; kept lines are copied through unchanged, in order.

#ifndef FORGE_PARAPHRASE_FILTER_H_
#define FORGE_PARAPHRASE_FILTER_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "forge/parser.h"
#include "forge/schema.h"

namespace forge {

struct FilterCounts {
  uint64_t kept = 0;
  uint64_t discarded = 0;
};

struct FilterReport {
  uint64_t input = 0;
  uint64_t kept = 0;
  uint64_t discarded = 0;
  uint64_t malformed = 0;
  std::map<std::string, FilterCounts> per_tag;  // "untagged" without a tag
};

enum class Verdict { kKept, kDiscarded, kMalformed };

// Judges one candidate line. Parser failures other than a wrong or Invalid
// state propagate as exceptions.
Verdict judge_candidate(const std::string& line, ParserHandle& parser, const SchemaSet& schemas,
                        std::string* tag = nullptr);

FilterReport filter_paraphrases(std::istream& in, std::ostream& kept, ParserHandle& parser,
                                const SchemaSet& schemas);

std::string filter_report_json(const FilterReport& r);

}  // namespace forge

#endif  // FORGE_PARAPHRASE_FILTER_H_
