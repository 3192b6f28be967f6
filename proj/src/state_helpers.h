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

#ifndef FORGE_SRC_STATE_HELPERS_H_
#define FORGE_SRC_STATE_HELPERS_H_

#include <optional>
#include <string>

#include "forge/schema.h"
#include "forge/toc.h"

namespace forge::detail {

const DomainRecord* focus_record(const Context& ctx);

// First filterable, non-key, enumerated column without any atom in `q`.
std::optional<std::string> askable_slot(const SchemaSet& schemas, const QueryStatement& q);

bool key_pinned(const QueryStatement& q, const SchemaSet& schemas);

// The entity the user is most likely talking about in `domain`: the
// proposal, then a just-finished action, then the first query result.
std::optional<Value> entity_in_focus(const Context& ctx, const SchemaSet& schemas,
                                     const std::string& domain);

// A proposed first action on the query's first result. With `skip_done`,
// nothing is offered for an entity whose action already succeeded.
std::optional<Statement> offer_for(const Context& ctx, const SchemaSet& schemas,
                                   const Statement& query, bool skip_done);

}  // namespace forge::detail

#endif  // FORGE_SRC_STATE_HELPERS_H_
