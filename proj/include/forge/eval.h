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

// Turn and dialogue metrics, and turn categorization against a machine and
// a training-set signature.

#ifndef FORGE_EVAL_H_
#define FORGE_EVAL_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "forge/schema.h"
#include "forge/state_machine.h"
#include "forge/toc.h"

namespace forge {

class Database;

struct EvalRecord {
  std::string dialogue_id;
  uint64_t turn = 0;
  std::string context;  // user-facing linearization
  std::string utterance;
  std::string gold;
  std::string pred;
};

struct Tally {
  uint64_t turns = 0;
  uint64_t em = 0;
  uint64_t slot = 0;
};

enum class Category { kUnrepresentable, kTrained, kSynthesizable, kUnsynthesizable };
std::string_view category_name(Category c);

struct MetricsReport {
  uint64_t turns = 0;
  uint64_t dialogues = 0;
  double turn_em = 0;
  double turn_slot = 0;
  // A turn counts iff it and every earlier turn of its dialogue are correct.
  double dialogue_em = 0;
  double dialogue_slot = 0;
  // Share of dialogues whose every turn is correct.
  double whole_dialogue_em = 0;
  double whole_dialogue_slot = 0;
  // Gold turns with an "either of" atom; slot accuracy takes its first value.
  uint64_t disjunction_turns = 0;
  int categorize_depth = 0;  // 0 without a categorizer
  std::map<std::string, Tally> per_domain;
  std::map<std::string, Tally> per_category;  // empty without a categorizer
};

// Values replaced by per-kind placeholders, counts by buckets and result
// rows dropped; acts, slots, operators and statuses kept.
std::string abstract_shape(const Context& user_ctx, const UserState& us);

using Signature = std::set<std::string>;

struct Categorizer {
  const MachineSpec& machine;
  const Grammar& grammar;
  const Database& db;
  const Signature& signature;
  // 1: followups of the gold agent state only. 2: also followups of any
  // agent state the machine could have produced in the gold context.
  int max_depth = 2;
};

Category categorize(const Categorizer& c, const Context& user_ctx, const UserState& gold);

// Throws Error(kValidation) naming the dialogue on a gap in turn indices and
// Error(kParse) on an unparseable gold state or context.
MetricsReport evaluate(const std::vector<EvalRecord>& records, const SchemaSet& schemas,
                       const Categorizer* categorizer = nullptr);

std::string report_json(const MetricsReport& r);

Signature load_signature(const std::string& path);
void save_signature(const Signature& s, const std::string& path);

}  // namespace forge

#endif  // FORGE_EVAL_H_
