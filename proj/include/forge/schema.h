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

// Domain definitions: one table plus its actions per domain, with the
// natural-language annotations that the template grammar consumes.

#ifndef FORGE_SCHEMA_H_
#define FORGE_SCHEMA_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace forge {

enum class ValueKind { kStringEnum, kFreeString, kInteger, kTimeOfDay, kDayOfWeek };

std::string_view value_kind_name(ValueKind kind);
std::optional<ValueKind> parse_value_kind(std::string_view name);

// How a phrase annotation is used by the templates. A '#' marks the value.
//   kNoun      "part of town"     names the slot itself (questions)
//   kAdjective "#"                value before the domain noun
//   kPrep      "in the #"         value after the domain noun
//   kVerb      "serves # food"    value in a verb phrase ("that serves ...")
enum class PhraseRole { kNoun, kAdjective, kPrep, kVerb };

PhraseRole classify_phrase(std::string_view phrase);

struct ColumnSpec {
  std::string name;
  ValueKind kind = ValueKind::kFreeString;
  bool filterable = false;
  bool requestable = false;
  std::vector<std::string> phrases;

  std::vector<std::string> phrases_with(PhraseRole role) const;
  // First noun phrase, or the column name with underscores spaced.
  std::string noun() const;
};

struct ParamSpec {
  std::string name;
  ValueKind kind = ValueKind::kFreeString;
  bool required = false;
  std::optional<std::string> links_table_column;
  std::vector<std::string> phrases;

  std::vector<std::string> phrases_with(PhraseRole role) const;
  std::string noun() const;
};

struct TableSchema {
  std::string name;
  std::string entity_key;
  std::vector<ColumnSpec> columns;

  const ColumnSpec* column(std::string_view name) const;
};

struct ActionSchema {
  std::string name;
  std::vector<ParamSpec> params;
  std::vector<std::string> phrases;

  const ParamSpec* param(std::string_view name) const;
  // Phrases that refer back to an entity already in focus ("book it").
  std::vector<std::string> referring_phrases() const;
  // Phrases that need an explicit entity ("book a table").
  std::vector<std::string> standalone_phrases() const;
};

struct DomainSchema {
  std::string name;
  std::vector<std::string> phrases;  // nouns for the domain itself
  TableSchema table;
  std::vector<ActionSchema> actions;

  const ActionSchema* action(std::string_view name) const;
  // The parameter of `action` that carries the entity key.
  const ParamSpec* entity_param(const ActionSchema& action) const;
};

class SchemaSet {
 public:
  SchemaSet() = default;
  explicit SchemaSet(std::vector<DomainSchema> domains);

  const std::vector<DomainSchema>& domains() const { return domains_; }
  const DomainSchema* domain(std::string_view name) const;
  const DomainSchema& require(std::string_view name) const;
  bool empty() const { return domains_.empty(); }

 private:
  std::vector<DomainSchema> domains_;
};

// Parses and validates a schema file. Throws Error(kParse) with position on
// malformed JSON and Error(kValidation) naming the offending field otherwise.
SchemaSet load_schemas(const std::string& path);
SchemaSet parse_schemas(std::string_view json_text);

}  // namespace forge

#endif  // FORGE_SCHEMA_H_
