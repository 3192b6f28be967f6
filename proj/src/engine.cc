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

#include "forge/engine.h"

#include <algorithm>

#include "json.hpp"

namespace forge {
namespace {

using nlohmann::json;

Value cell_value(const json& cell, const ColumnSpec& col, const std::string& where) {
  std::optional<Value> v;
  if (col.kind == ValueKind::kInteger && cell.is_number_integer()) {
    v = Value::integer(cell.get<int64_t>());
  } else if (cell.is_string()) {
    v = value_from_text(col.kind, cell.get<std::string>());
  }
  if (!v) throw Error(ErrorKind::kValidation, where + ": bad value for " + col.name);
  return *v;
}

bool compare(FilterOp op, const Value& row_value, const Value& want) {
  if (want.is_dontcare()) return true;
  if (op == FilterOp::kEq || op == FilterOp::kNeq) {
    const bool eq = row_value.normalized() == want.normalized();
    return op == FilterOp::kEq ? eq : !eq;
  }
  if (!row_value.is_ordered() || row_value.storage().index() != want.storage().index()) {
    return false;
  }
  switch (op) {
    case FilterOp::kLt: return row_value < want;
    case FilterOp::kGt: return row_value > want;
    case FilterOp::kLeq: return row_value <= want;
    case FilterOp::kGeq: return row_value >= want;
    default: return false;
  }
}

}  // namespace

Database::Database(const SchemaSet& schemas, std::map<std::string, std::vector<Row>> tables)
    : schemas_(&schemas) {
  for (auto& [domain, rows] : tables) {
    const DomainSchema& d = schemas.require(domain);
    const std::string& key = d.table.entity_key;
    for (size_t i = 0; i < rows.size(); ++i) {
      for (const auto& col : d.table.columns) {
        auto it = rows[i].find(col.name);
        if (it == rows[i].end()) {
          throw Error(ErrorKind::kValidation,
                      domain + "[" + std::to_string(i) + "]: missing column " + col.name);
        }
        if (it->second.is_dontcare() || !it->second.fits(col.kind)) {
          throw Error(ErrorKind::kValidation,
                      domain + "[" + std::to_string(i) + "]: bad value for " + col.name);
        }
      }
    }
    std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
      return a.at(key).normalized() < b.at(key).normalized();
    });
    auto& index = key_index_[domain];
    for (size_t i = 0; i < rows.size(); ++i) {
      if (!index.emplace(rows[i].at(key).normalized(), i).second) {
        throw Error(ErrorKind::kValidation,
                    domain + ": duplicate entity key '" + rows[i].at(key).display() + "'");
      }
    }
    auto& distinct = distinct_[domain];
    for (const auto& col : d.table.columns) {
      auto& values = distinct[col.name];
      std::set<Value> seen;
      for (const auto& row : rows) {
        if (seen.insert(row.at(col.name).normalized()).second) values.push_back(row.at(col.name));
      }
    }
    tables_[domain] = std::move(rows);
  }
  for (const auto& d : schemas.domains()) {
    if (!tables_.count(d.name)) {
      tables_[d.name] = {};
      key_index_[d.name] = {};
      for (const auto& col : d.table.columns) distinct_[d.name][col.name] = {};
    }
  }
}

const std::vector<Row>& Database::rows(std::string_view domain) const {
  auto it = tables_.find(domain);
  if (it == tables_.end()) throw Error(ErrorKind::kValidation, "no table '" + std::string(domain) + "'");
  return it->second;
}

const Row* Database::find(std::string_view domain, const Value& key) const {
  auto it = key_index_.find(domain);
  if (it == key_index_.end()) return nullptr;
  auto k = it->second.find(key.normalized());
  if (k == it->second.end()) return nullptr;
  return &tables_.find(domain)->second[k->second];
}

const std::vector<Value>& Database::distinct(std::string_view domain,
                                             std::string_view column) const {
  auto it = distinct_.find(domain);
  if (it == distinct_.end()) throw Error(ErrorKind::kValidation, "no table '" + std::string(domain) + "'");
  auto c = it->second.find(column);
  if (c == it->second.end()) {
    throw Error(ErrorKind::kValidation, "no column '" + std::string(domain) + "." +
                                            std::string(column) + "'");
  }
  return c->second;
}

Database parse_database(std::string_view json_text, const SchemaSet& schemas) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, std::string("database parse error: ") + e.what());
  }
  if (!root.is_object()) throw Error(ErrorKind::kValidation, "database: expected an object");
  std::map<std::string, std::vector<Row>> tables;
  for (auto& [domain, rows] : root.items()) {
    const DomainSchema& d = schemas.require(domain);
    if (!rows.is_array()) throw Error(ErrorKind::kValidation, domain + ": expected an array");
    auto& out = tables[domain];
    for (size_t i = 0; i < rows.size(); ++i) {
      const std::string where = domain + "[" + std::to_string(i) + "]";
      if (!rows[i].is_object()) throw Error(ErrorKind::kValidation, where + ": expected an object");
      Row row;
      for (auto& [k, cell] : rows[i].items()) {
        const ColumnSpec* col = d.table.column(k);
        if (!col) throw Error(ErrorKind::kValidation, where + ": unknown column " + k);
        row[k] = cell_value(cell, *col, where);
      }
      out.push_back(std::move(row));
    }
  }
  return Database(schemas, std::move(tables));
}

Database load_database(const std::string& path, const SchemaSet& schemas) {
  return parse_database(read_file(path), schemas);
}

bool atom_matches(const FilterAtom& atom, const Row& row) {
  if (atom.is_dontcare()) return true;
  auto it = row.find(atom.slot);
  if (it == row.end()) return false;
  if (atom.op == FilterOp::kNeq) {
    for (const auto& v : atom.values) {
      if (!compare(FilterOp::kNeq, it->second, v)) return false;
    }
    return true;
  }
  for (const auto& v : atom.values) {
    if (compare(atom.op, it->second, v)) return true;
  }
  return false;
}

ExecResult execute_query(const Database& db, const QueryStatement& q) {
  ExecResult r;
  const DomainSchema* d = db.schemas().domain(q.domain);
  if (!d) {
    r.error = ExecError{"invalid_param", q.domain};
    return r;
  }
  for (const auto& atom : q.filter) {
    if (!d->table.column(atom.slot)) {
      r.error = ExecError{"invalid_param", atom.slot};
      return r;
    }
  }
  for (const auto& row : db.rows(q.domain)) {
    bool ok = true;
    for (const auto& atom : q.filter) {
      if (!atom_matches(atom, row)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    if (r.count == 0) r.first = row;
    ++r.count;
  }
  return r;
}

ActionOutcome execute_action(const Database& db, const ActionStatement& a, Rng& rng,
                             ExecMode mode, double p_fail) {
  const SchemaSet& schemas = db.schemas();
  if (!a.complete(schemas)) {
    throw Error(ErrorKind::kInternal, "execute_action called on incomplete " + a.action);
  }
  const DomainSchema& d = schemas.require(a.domain);
  const ActionSchema* act = d.action(a.action);
  ActionOutcome out;
  for (const auto& [k, v] : a.params) {
    const ParamSpec* p = act->param(k);
    if (!p || !v.fits(p->kind)) {
      out.error_code = "invalid_param";
      out.param = k;
      return out;
    }
  }
  const ParamSpec* key = d.entity_param(*act);
  if (!db.find(a.domain, a.params.at(key->name))) {
    out.error_code = "missing_entity";
    out.param = key->name;
    return out;
  }
  if (mode == ExecMode::kSimulate && p_fail > 0 && rng.chance(p_fail)) {
    std::vector<std::string> bookable;
    for (const auto& p : act->params) {
      if (p.name != key->name && a.params.count(p.name)) bookable.push_back(p.name);
    }
    if (!bookable.empty()) {
      out.error_code = "unavailable_slot_value";
      out.param = rng.pick(bookable);
      return out;
    }
  }
  out.success = true;
  return out;
}

ExecResult to_exec_result(const ActionOutcome& outcome) {
  ExecResult r;
  if (outcome.success) {
    r.count = 1;
  } else {
    r.error = ExecError{outcome.error_code.value_or("invalid_param"), outcome.param};
  }
  return r;
}

Row sample_row(const Database& db, std::string_view domain, Rng& rng) {
  const auto& rows = db.rows(domain);
  if (rows.empty()) throw Error(ErrorKind::kState, "empty table '" + std::string(domain) + "'");
  return rows[rng.below(rows.size())];
}

Value sample_value(const Database& db, std::string_view domain, std::string_view column,
                   Rng& rng) {
  const auto& values = db.distinct(domain, column);
  if (values.empty()) throw Error(ErrorKind::kState, "empty table '" + std::string(domain) + "'");
  return values[rng.below(values.size())];
}

ExecResult DatabaseExecutor::run_query(const QueryStatement& q) { return execute_query(db_, q); }

ExecResult DatabaseExecutor::run_action(const ActionStatement& a) {
  return to_exec_result(execute_action(db_, a, rng_, mode_, p_fail_));
}

}  // namespace forge
