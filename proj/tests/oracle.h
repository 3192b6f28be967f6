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

// Independent full-scan query oracle over random typed tables. Comparisons
// are written out here rather than borrowed from the engine.

#ifndef FORGE_TESTS_ORACLE_H_
#define FORGE_TESTS_ORACLE_H_

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "forge/engine.h"
#include "forge/schema.h"

namespace forge::testing {

inline std::string fold(const std::string& s) {
  std::string out;
  for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  const size_t b = out.find_first_not_of(' '), e = out.find_last_not_of(' ');
  return b == std::string::npos ? "" : out.substr(b, e - b + 1);
}

// Numeric view of an ordered value, or nothing.
inline bool ordinal(const Value& v, long long& out) {
  if (v.is_int()) return out = v.as_int(), true;
  if (v.is_time()) return out = v.as_time().minutes, true;
  return false;
}

inline bool oracle_value_matches(FilterOp op, const Value& want, const Value& have) {
  if (want.is_dontcare()) return true;
  long long a, b;
  if (ordinal(have, a) && ordinal(want, b) && want.is_int() == have.is_int()) {
    switch (op) {
      case FilterOp::kEq: return a == b;
      case FilterOp::kNeq: return a != b;
      case FilterOp::kLt: return a < b;
      case FilterOp::kGt: return a > b;
      case FilterOp::kLeq: return a <= b;
      case FilterOp::kGeq: return a >= b;
    }
  }
  bool eq;
  if (want.is_str() && have.is_str()) {
    eq = fold(want.as_str()) == fold(have.as_str());
  } else if (want.is_day() && have.is_day()) {
    eq = want.as_day() == have.as_day();
  } else {
    eq = false;
  }
  if (op == FilterOp::kEq) return eq;
  if (op == FilterOp::kNeq) return !eq;
  return false;
}

struct OracleResult {
  size_t count = 0;
  std::vector<const Row*> rows;
};

inline OracleResult oracle_query(const std::vector<Row>& rows, const QueryStatement& q) {
  OracleResult r;
  for (const Row& row : rows) {
    bool all = true;
    for (const FilterAtom& atom : q.filter) {
      auto it = row.find(atom.slot);
      // "!=" over several values means none of them; every other op, any.
      const bool none_of = atom.op == FilterOp::kNeq;
      bool ok = none_of;
      for (const Value& v : atom.values) {
        const bool m = it != row.end() && oracle_value_matches(atom.op, v, it->second);
        ok = none_of ? (ok && m) : (ok || m);
      }
      if (it == row.end() && !(atom.values.size() == 1 && atom.values[0].is_dontcare())) ok = false;
      all = all && ok;
    }
    if (all) r.rows.push_back(&row);
  }
  r.count = r.rows.size();
  return r;
}

inline const char* kRandomSchema = R"({"domains": [{
  "name": "thing", "phrases": ["thing"],
  "table": {"name": "thing", "entity_key": "name", "columns": [
    {"name": "name", "kind": "free_string", "filterable": true, "requestable": false, "phrases": ["name"]},
    {"name": "color", "kind": "string_enum", "filterable": true, "requestable": true, "phrases": ["color", "#"]},
    {"name": "size", "kind": "integer", "filterable": true, "requestable": true, "phrases": ["size", "of size #"]},
    {"name": "opens", "kind": "time_of_day", "filterable": true, "requestable": true, "phrases": ["opening time", "opening at #"]},
    {"name": "day", "kind": "day_of_week", "filterable": true, "requestable": true, "phrases": ["day", "on #"]}
  ]},
  "actions": []}]})";

inline const std::vector<std::string>& random_colors() {
  static const std::vector<std::string> c = {"red", "Green", "blue", "teal", "black"};
  return c;
}

inline std::vector<Row> random_rows(Rng& rng, size_t n) {
  std::vector<Row> rows;
  for (size_t i = 0; i < n; ++i) {
    Row r;
    r["name"] = Value::str("item " + std::to_string(i));
    r["color"] = Value::str(rng.pick(random_colors()));
    r["size"] = Value::integer(static_cast<int64_t>(rng.below(10)));
    r["opens"] = Value::time({static_cast<int>(6 * 60 + 30 * rng.below(30))});
    r["day"] = Value::day(static_cast<Day>(rng.below(7)));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline FilterAtom random_atom(Rng& rng) {
  FilterAtom a;
  switch (rng.below(5)) {
    case 0: {
      a.slot = "color";
      a.op = rng.chance(0.7) ? FilterOp::kEq : FilterOp::kNeq;
      std::string c = rng.pick(random_colors());
      if (rng.chance(0.3)) c = fold(c);  // case-insensitive match
      a.values.push_back(Value::str(c));
      if (rng.chance(0.3)) {
        a.values.push_back(Value::str(rng.pick(random_colors())));
      }
      break;
    }
    case 1:
      a.slot = "size";
      a.op = static_cast<FilterOp>(rng.below(6));
      a.values.push_back(Value::integer(static_cast<int64_t>(rng.below(10))));
      break;
    case 2:
      a.slot = "opens";
      a.op = static_cast<FilterOp>(rng.below(6));
      a.values.push_back(Value::time({static_cast<int>(6 * 60 + 30 * rng.below(30))}));
      break;
    case 3:
      a.slot = "day";
      a.values.push_back(Value::day(static_cast<Day>(rng.below(7))));
      break;
    default:
      a.slot = rng.chance(0.5) ? "color" : "size";
      a.values.push_back(Value::dontcare());
  }
  return a;
}

}  // namespace forge::testing

#endif  // FORGE_TESTS_ORACLE_H_
