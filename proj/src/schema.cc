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

#include "forge/schema.h"

#include <algorithm>
#include <set>

#include "forge/util.h"
#include "json.hpp"

namespace forge {
namespace {

using nlohmann::json;

const std::set<std::string>& prepositions() {
  static const std::set<std::string> kPreps = {
      "in", "with", "at", "on", "for", "from", "near", "called", "rated",
      "starting", "of", "by", "named"};
  return kPreps;
}

std::string default_noun(const std::string& name) {
  std::string out = name;
  for (auto& c : out) {
    if (c == '_') c = ' ';
  }
  return out;
}

[[noreturn]] void invalid(const std::string& where, const std::string& msg) {
  throw Error(ErrorKind::kValidation, where + ": " + msg);
}

void check_identifier(const std::string& where, const std::string& id) {
  if (!is_identifier(id)) invalid(where, "'" + id + "' is not a valid identifier");
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) invalid(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) invalid(where, std::string("missing field '") + key + "'");
  return *it;
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_string()) invalid(where + "." + key, "expected a string");
  return v.get<std::string>();
}

bool bool_field(const json& obj, const char* key, bool fallback, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) invalid(where + "." + key, "expected a boolean");
  return it->get<bool>();
}

std::vector<std::string> phrases_field(const json& obj, const std::string& where) {
  std::vector<std::string> out;
  auto it = obj.find("phrases");
  if (it == obj.end()) return out;
  if (!it->is_array()) invalid(where + ".phrases", "expected an array");
  for (const auto& p : *it) {
    if (!p.is_string()) invalid(where + ".phrases", "expected strings");
    std::string s = trim(to_lower(p.get<std::string>()));
    if (s.empty()) invalid(where + ".phrases", "empty phrase");
    if (std::count(s.begin(), s.end(), '#') > 1) {
      invalid(where + ".phrases", "phrase '" + s + "' has more than one '#'");
    }
    out.push_back(s);
  }
  return out;
}

ValueKind kind_field(const json& obj, const std::string& where) {
  const std::string k = string_field(obj, "kind", where);
  auto kind = parse_value_kind(k);
  if (!kind) invalid(where + ".kind", "unknown value kind '" + k + "'");
  return *kind;
}

std::vector<std::string> filter_role(const std::vector<std::string>& phrases,
                                     PhraseRole role) {
  std::vector<std::string> out;
  for (const auto& p : phrases) {
    if (classify_phrase(p) == role) out.push_back(p);
  }
  return out;
}

DomainSchema parse_domain(const json& d, size_t index) {
  const std::string where = "domains[" + std::to_string(index) + "]";
  DomainSchema out;
  out.name = string_field(d, "name", where);
  check_identifier(where + ".name", out.name);
  out.phrases = phrases_field(d, where);
  if (out.phrases.empty()) out.phrases.push_back(default_noun(out.name));

  const std::string twhere = where + ".table";
  const json& t = field(d, "table", where);
  out.table.name = string_field(t, "name", twhere);
  check_identifier(twhere + ".name", out.table.name);
  out.table.entity_key = string_field(t, "entity_key", twhere);
  const json& cols = field(t, "columns", twhere);
  if (!cols.is_array()) invalid(twhere + ".columns", "expected an array");
  std::set<std::string> seen;
  for (size_t i = 0; i < cols.size(); ++i) {
    const std::string cwhere = twhere + ".columns[" + std::to_string(i) + "]";
    ColumnSpec c;
    c.name = string_field(cols[i], "name", cwhere);
    check_identifier(cwhere + ".name", c.name);
    if (!seen.insert(c.name).second) invalid(cwhere + ".name", "duplicate column '" + c.name + "'");
    c.kind = kind_field(cols[i], cwhere);
    c.filterable = bool_field(cols[i], "filterable", false, cwhere);
    c.requestable = bool_field(cols[i], "requestable", false, cwhere);
    c.phrases = phrases_field(cols[i], cwhere);
    if ((c.filterable || c.requestable) && c.phrases.empty()) {
      invalid(cwhere + ".phrases", "column '" + c.name + "' needs at least one phrase");
    }
    out.table.columns.push_back(std::move(c));
  }
  if (!out.table.column(out.table.entity_key)) {
    invalid(twhere + ".entity_key", "no column named '" + out.table.entity_key + "'");
  }

  auto ait = d.find("actions");
  if (ait != d.end()) {
    if (!ait->is_array()) invalid(where + ".actions", "expected an array");
    std::set<std::string> anames;
    for (size_t i = 0; i < ait->size(); ++i) {
      const json& a = (*ait)[i];
      const std::string awhere = where + ".actions[" + std::to_string(i) + "]";
      ActionSchema act;
      act.name = string_field(a, "name", awhere);
      check_identifier(awhere + ".name", act.name);
      if (!anames.insert(act.name).second) invalid(awhere + ".name", "duplicate action");
      act.phrases = phrases_field(a, awhere);
      if (act.phrases.empty()) act.phrases.push_back(default_noun(act.name));
      const json& params = field(a, "params", awhere);
      if (!params.is_array()) invalid(awhere + ".params", "expected an array");
      std::set<std::string> pnames;
      for (size_t j = 0; j < params.size(); ++j) {
        const std::string pwhere = awhere + ".params[" + std::to_string(j) + "]";
        ParamSpec p;
        p.name = string_field(params[j], "name", pwhere);
        check_identifier(pwhere + ".name", p.name);
        if (!pnames.insert(p.name).second) invalid(pwhere + ".name", "duplicate param");
        p.kind = kind_field(params[j], pwhere);
        p.required = bool_field(params[j], "required", false, pwhere);
        p.phrases = phrases_field(params[j], pwhere);
        auto lit = params[j].find("links");
        if (lit != params[j].end()) {
          if (!lit->is_string()) invalid(pwhere + ".links", "expected a string");
          p.links_table_column = lit->get<std::string>();
          if (!out.table.column(*p.links_table_column)) {
            invalid(pwhere + ".links", "no column named '" + *p.links_table_column + "'");
          }
        } else if (out.table.column(p.name)) {
          // A parameter named like a column is the link to that column.
          p.links_table_column = p.name;
        }
        act.params.push_back(std::move(p));
      }
      if (!out.entity_param(act)) {
        invalid(awhere, "action '" + act.name + "' has no parameter linking entity key '" +
                            out.table.entity_key + "'");
      }
      out.actions.push_back(std::move(act));
    }
  }
  return out;
}

}  // namespace

std::string_view value_kind_name(ValueKind kind) {
  switch (kind) {
    case ValueKind::kStringEnum: return "string_enum";
    case ValueKind::kFreeString: return "free_string";
    case ValueKind::kInteger: return "integer";
    case ValueKind::kTimeOfDay: return "time_of_day";
    case ValueKind::kDayOfWeek: return "day_of_week";
  }
  return "free_string";
}

std::optional<ValueKind> parse_value_kind(std::string_view name) {
  if (name == "string_enum") return ValueKind::kStringEnum;
  if (name == "free_string") return ValueKind::kFreeString;
  if (name == "integer") return ValueKind::kInteger;
  if (name == "time_of_day") return ValueKind::kTimeOfDay;
  if (name == "day_of_week") return ValueKind::kDayOfWeek;
  return std::nullopt;
}

PhraseRole classify_phrase(std::string_view phrase) {
  if (phrase.find('#') == std::string_view::npos) return PhraseRole::kNoun;
  if (trim(phrase) == "#") return PhraseRole::kAdjective;
  auto words = split_ws(phrase);
  if (!words.empty() && prepositions().count(words[0])) return PhraseRole::kPrep;
  return PhraseRole::kVerb;
}

std::vector<std::string> ColumnSpec::phrases_with(PhraseRole role) const {
  return filter_role(phrases, role);
}

std::string ColumnSpec::noun() const {
  auto nouns = phrases_with(PhraseRole::kNoun);
  return nouns.empty() ? default_noun(name) : nouns.front();
}

std::vector<std::string> ParamSpec::phrases_with(PhraseRole role) const {
  return filter_role(phrases, role);
}

std::string ParamSpec::noun() const {
  auto nouns = phrases_with(PhraseRole::kNoun);
  return nouns.empty() ? default_noun(name) : nouns.front();
}

const ColumnSpec* TableSchema::column(std::string_view n) const {
  for (const auto& c : columns) {
    if (c.name == n) return &c;
  }
  return nullptr;
}

const ParamSpec* ActionSchema::param(std::string_view n) const {
  for (const auto& p : params) {
    if (p.name == n) return &p;
  }
  return nullptr;
}

std::vector<std::string> ActionSchema::referring_phrases() const {
  std::vector<std::string> out;
  for (const auto& p : phrases) {
    auto w = split_ws(p);
    if (std::find(w.begin(), w.end(), "it") != w.end()) out.push_back(p);
  }
  return out;
}

std::vector<std::string> ActionSchema::standalone_phrases() const {
  std::vector<std::string> out;
  for (const auto& p : phrases) {
    auto w = split_ws(p);
    if (std::find(w.begin(), w.end(), "it") == w.end()) out.push_back(p);
  }
  return out;
}

const ActionSchema* DomainSchema::action(std::string_view n) const {
  for (const auto& a : actions) {
    if (a.name == n) return &a;
  }
  return nullptr;
}

const ParamSpec* DomainSchema::entity_param(const ActionSchema& a) const {
  for (const auto& p : a.params) {
    if (p.links_table_column && *p.links_table_column == table.entity_key) return &p;
  }
  return nullptr;
}

SchemaSet::SchemaSet(std::vector<DomainSchema> domains) : domains_(std::move(domains)) {
  std::set<std::string> names;
  for (const auto& d : domains_) {
    if (!names.insert(d.name).second) {
      throw Error(ErrorKind::kValidation, "domains: duplicate domain '" + d.name + "'");
    }
  }
}

const DomainSchema* SchemaSet::domain(std::string_view name) const {
  for (const auto& d : domains_) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

const DomainSchema& SchemaSet::require(std::string_view name) const {
  const DomainSchema* d = domain(name);
  if (!d) throw Error(ErrorKind::kValidation, "unknown domain '" + std::string(name) + "'");
  return *d;
}

SchemaSet parse_schemas(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i + 1 < e.byte && i < json_text.size(); ++i) {
      if (json_text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::kParse, "schema parse error at line " + std::to_string(line) +
                                       ", column " + std::to_string(col) + ": " + e.what());
  }
  const json& domains = field(root, "domains", "schema");
  if (!domains.is_array()) invalid("domains", "expected an array");
  std::vector<DomainSchema> out;
  for (size_t i = 0; i < domains.size(); ++i) out.push_back(parse_domain(domains[i], i));
  return SchemaSet(std::move(out));
}

SchemaSet load_schemas(const std::string& path) { return parse_schemas(read_file(path)); }

}  // namespace forge
