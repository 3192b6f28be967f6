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

// Template grammar shared by generation and understanding. A grammar is a
// finite, acyclic set of productions over literals, nonterminals, typed value
// slots and (agent side only) named text placeholders. `expand` walks it
// forward to produce utterances; `parse_utterance` inverts it with a
// memoized chart over token spans.

#ifndef FORGE_TEMPLATES_H_
#define FORGE_TEMPLATES_H_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/schema.h"
#include "forge/toc.h"
#include "forge/util.h"

namespace forge {

class Database;

inline constexpr std::string_view kUserTurn = "USER_TURN";
inline constexpr std::string_view kAgentTurn = "AGENT_TURN";

struct ValueSlotSpec {
  std::string domain;
  std::string slot;        // column or parameter name
  std::string lex_column;  // column whose lexicon entries fill the slot
  ValueKind kind = ValueKind::kFreeString;
  FilterOp op = FilterOp::kEq;
  bool disjunct = false;  // joins the previous binding on the same slot
  std::string role;       // optional key for caller-fixed values

  std::string key() const { return role.empty() ? domain + "." + slot : role; }
};

struct Part {
  enum class Kind { kLiteral, kNonterminal, kValue, kPlaceholder };
  Kind kind = Kind::kLiteral;
  std::string text;  // literal surface, nonterminal name or placeholder name
  std::vector<std::string> tokens;  // tokenized literal
  ValueSlotSpec slot;

  static Part literal(std::string text);
  static Part nt(std::string name);
  static Part value(ValueSlotSpec spec);
  static Part placeholder(std::string name);
};

struct Production {
  std::vector<Part> parts;
  std::string tag;  // semantic tag; set on start-symbol productions
  std::map<std::string, std::string> params;  // e.g. domain/slot/action
};

class Grammar {
 public:
  void add(const std::string& nonterminal, Production p);
  const std::vector<Production>* productions(std::string_view nonterminal) const;
  const std::map<std::string, std::vector<Production>, std::less<>>& all() const {
    return rules_;
  }
  // Throws Error(kValidation) on undefined references or cycles.
  void validate() const;
  size_t size() const;

 private:
  std::map<std::string, std::vector<Production>, std::less<>> rules_;
};

struct Binding {
  std::string domain;
  std::string slot;
  Value value;
  FilterOp op = FilterOp::kEq;
  bool disjunct = false;
  std::string role;
  bool operator==(const Binding&) const = default;
};

struct Derivation {
  std::string tag;
  const Production* top = nullptr;
  std::vector<Binding> bindings;  // in surface order
  int num_productions = 0;
  std::string trace;  // bracketed production chain, for dumps and tie-breaks
};

// Surface token sequence -> typed values, built from table contents.
class Lexicon {
 public:
  struct Entry {
    std::string domain;
    std::string column;
    Value value;
  };
  struct Match {
    size_t end;
    const Entry* entry;
  };

  void add(const std::string& domain, const std::string& column, const Value& value);
  // Entries whose surface starts at tokens[start], longest first.
  std::vector<Match> lookup(const std::vector<std::string>& tokens, size_t start) const;
  bool contains(const std::string& domain, const std::string& column, const Value& v) const;
  size_t size() const { return count_; }

 private:
  std::map<std::vector<std::string>, std::vector<Entry>> entries_;
  size_t max_len_ = 0;
  size_t count_ = 0;
};

Lexicon build_lexicon(const Database& db);

using ValueSampler = std::function<Value(const ValueSlotSpec&, Rng&)>;
// Samples string slots from the table's distinct values, numbers/times/days
// from fixed ranges.
ValueSampler database_sampler(const Database& db);

struct ExpandRequest {
  std::string start;
  // Restricts the productions of `start`; inner nonterminals are unfiltered.
  std::function<bool(const Production&)> filter;
  std::map<std::string, Value> fixed;         // by ValueSlotSpec::key()
  std::map<std::string, std::string> text;    // placeholder fillers
  ValueSampler sampler;
  const Lexicon* lexicon = nullptr;  // when set, fixed strings must be known
};

struct Expansion {
  std::string utterance;
  Derivation derivation;
};

// Throws Error(kState) if no production passes the filter or a fixed value
// is not in the lexicon.
Expansion expand(const Grammar& g, const ExpandRequest& req, Rng& rng);

using ValueChoices = std::function<std::vector<Value>(const ValueSlotSpec&)>;

// Every expansion of the productions of `start` passing `filter`, with each
// value slot ranging over `choices`, at most `limit` per production.
// Placeholders expand to their name in braces.
std::vector<Expansion> enumerate_expansions(const Grammar& g, std::string_view start,
                                            const std::function<bool(const Production&)>& filter,
                                            const ValueChoices& choices, size_t limit);

struct ScoredDerivation {
  Derivation derivation;
  bool admissible = false;
};

using Admissible = std::function<bool(const Derivation&)>;

// All derivations of `start` whose yield equals the tokenized utterance,
// ranked: admissible first, then more bound values, fewer productions,
// lexicographic tag, lexicographic trace.
std::vector<ScoredDerivation> parse_utterance(const Grammar& g, const Lexicon& lex,
                                              std::string_view utterance,
                                              const Admissible& admissible,
                                              std::string_view start = kUserTurn);

// Loads user-supplied productions (one JSON object per line or a JSON array)
// of the form {"nonterminal":..,"parts":[..],"tag":..}; a part is a literal
// string, {"nt":NAME}, {"value":"domain.slot"} or {"placeholder":NAME}.
void load_template_file(const std::string& path, const SchemaSet& schemas, Grammar& g);

}  // namespace forge

#endif  // FORGE_TEMPLATES_H_
