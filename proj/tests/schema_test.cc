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

#include "doctest.h"
#include "forge/schema.h"
#include "forge/util.h"
#include "world.h"

using namespace forge;
using forge::testing::data;
using forge::testing::fixture;

TEST_SUITE("schema") {
  TEST_CASE("restaurant fixture shape") {
    const SchemaSet s = load_schemas(fixture("restaurant.schema.json"));
    REQUIRE(s.domains().size() == 1);
    const DomainSchema& d = s.domains()[0];
    CHECK(d.name == "restaurant");
    CHECK(d.table.entity_key == "name");
    CHECK(d.table.columns.size() == 7);
    REQUIRE(d.actions.size() == 1);
    CHECK(d.actions[0].name == "make_reservation");
    CHECK(d.entity_param(d.actions[0])->name == "name");
  }

  TEST_CASE("zero domains loads as an empty set") {
    CHECK(load_schemas(fixture("empty.schema.json")).empty());
  }

  TEST_CASE("action without an entity link names the action") {
    try {
      load_schemas(fixture("no_entity_link.schema.json"));
      FAIL("expected a validation error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kValidation);
      CHECK(std::string(e.what()).find("make_reservation") != std::string::npos);
    }
  }

  TEST_CASE("malformed json is a parse error") {
    try {
      parse_schemas("{\"domains\": [");
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kParse);
    }
  }

  TEST_CASE("loading is a pure function of the bytes") {
    const std::string text = read_file(data("schemas.json"));
    const SchemaSet a = parse_schemas(text), b = parse_schemas(text);
    REQUIRE(a.domains().size() == b.domains().size());
    for (size_t i = 0; i < a.domains().size(); ++i) {
      CHECK(a.domains()[i].name == b.domains()[i].name);
      CHECK(a.domains()[i].table.columns.size() == b.domains()[i].table.columns.size());
    }
  }

  TEST_CASE("phrase roles") {
    CHECK(classify_phrase("part of town") == PhraseRole::kNoun);
    CHECK(classify_phrase("#") == PhraseRole::kAdjective);
    CHECK(classify_phrase("in the # part of town") == PhraseRole::kPrep);
    CHECK(classify_phrase("serves # food") == PhraseRole::kVerb);
  }
}
