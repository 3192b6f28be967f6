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

// In-memory tables, query selection and simulated action execution.

#ifndef FORGE_ENGINE_H_
#define FORGE_ENGINE_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/schema.h"
#include "forge/toc.h"
#include "forge/util.h"

namespace forge {

class Database {
 public:
  Database() = default;
  // Rows are sorted by entity key (normalized) on construction. Throws
  // Error(kValidation) on duplicate keys, missing columns or bad values.
  Database(const SchemaSet& schemas, std::map<std::string, std::vector<Row>> tables);

  const std::vector<Row>& rows(std::string_view domain) const;
  const Row* find(std::string_view domain, const Value& key) const;
  // Distinct values of a column in first-seen (entity key) order.
  const std::vector<Value>& distinct(std::string_view domain, std::string_view column) const;
  const SchemaSet& schemas() const { return *schemas_; }

 private:
  const SchemaSet* schemas_ = nullptr;
  std::map<std::string, std::vector<Row>, std::less<>> tables_;
  std::map<std::string, std::map<std::string, std::vector<Value>, std::less<>>, std::less<>>
      distinct_;
  std::map<std::string, std::map<Value, size_t>, std::less<>> key_index_;
};

// The schema set must outlive the database.
Database load_database(const std::string& path, const SchemaSet& schemas);
Database parse_database(std::string_view json_text, const SchemaSet& schemas);

// Whether `row` satisfies one atom. Dontcare is vacuously true; several
// values match if any does; strings compare case-insensitively.
bool atom_matches(const FilterAtom& atom, const Row& row);

ExecResult execute_query(const Database& db, const QueryStatement& q);

enum class ExecMode { kLive, kSimulate };

struct ActionOutcome {
  bool success = false;
  std::optional<std::string> error_code;  // missing_entity | unavailable_slot_value | invalid_param
  std::string param;
};

// Requires a.complete(); throws Error(kInternal) otherwise. In simulate mode
// a passing action fails with unavailable_slot_value with probability
// `p_fail`, naming one non-key parameter picked by `rng`.
ActionOutcome execute_action(const Database& db, const ActionStatement& a, Rng& rng,
                             ExecMode mode, double p_fail = 0.1);

ExecResult to_exec_result(const ActionOutcome& outcome);

Row sample_row(const Database& db, std::string_view domain, Rng& rng);
Value sample_value(const Database& db, std::string_view domain, std::string_view column,
                   Rng& rng);

// Executor backed by a Database; owns nothing but the rng stream it is given.
class DatabaseExecutor : public Executor {
 public:
  DatabaseExecutor(const Database& db, Rng& rng, ExecMode mode, double p_fail)
      : db_(db), rng_(rng), mode_(mode), p_fail_(p_fail) {}

  ExecResult run_query(const QueryStatement& q) override;
  ExecResult run_action(const ActionStatement& a) override;

 private:
  const Database& db_;
  Rng& rng_;
  ExecMode mode_;
  double p_fail_;
};

}  // namespace forge

#endif  // FORGE_ENGINE_H_
