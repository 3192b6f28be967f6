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

#include <set>

#include "doctest.h"
#include "forge/engine.h"
#include "oracle.h"
#include "world.h"

using namespace forge;
using namespace forge::testing;

namespace {

QueryStatement q_restaurant(std::vector<FilterAtom> atoms) {
  QueryStatement q;
  q.domain = "restaurant";
  q.filter = std::move(atoms);
  return q;
}

FilterAtom eq(const std::string& slot, const std::string& v) {
  return FilterAtom{slot, FilterOp::kEq, {Value::str(v)}};
}

ActionStatement booking(const std::string& name) {
  ActionStatement a;
  a.domain = "restaurant";
  a.action = "make_reservation";
  a.params["name"] = Value::str(name);
  a.params["book_day"] = Value::day(Day::kFri);
  a.params["book_people"] = Value::integer(4);
  a.params["book_time"] = Value::time({19 * 60});
  return a;
}

}  // namespace

TEST_SUITE("engine") {
  TEST_CASE("five row goldens") {
    const Database& db = five_world().db;
    ExecResult r = execute_query(db, q_restaurant({eq("food", "indian")}));
    CHECK(r.count == 2);
    REQUIRE(r.first);
    CHECK(r.first->at("name") == Value::str("curry garden"));
    CHECK(execute_query(db, q_restaurant({})).count == 5);
    CHECK(execute_query(db, q_restaurant({eq("food", "klingon")})).count == 0);
    CHECK_FALSE(execute_query(db, q_restaurant({eq("food", "klingon")})).first);
    CHECK(execute_query(db, q_restaurant({eq("food", "INDIAN ")})).count == 2);
    FilterAtom either{"food", FilterOp::kEq, {Value::str("indian"), Value::str("chinese")}};
    CHECK(execute_query(db, q_restaurant({either})).count == 3);
    FilterAtom neither{"food", FilterOp::kNeq, {Value::str("indian"), Value::str("chinese")}};
    CHECK(execute_query(db, q_restaurant({neither})).count == 2);
    FilterAtom dc{"area", FilterOp::kEq, {Value::dontcare()}};
    CHECK(execute_query(db, q_restaurant({dc, eq("price_range", "expensive")})).count == 2);
  }

  TEST_CASE("unknown slot is an invalid_param result") {
    ExecResult r = execute_query(five_world().db, q_restaurant({eq("stars", "4")}));
    REQUIRE(r.error);
    CHECK(r.error->code == "invalid_param");
    CHECK(r.error->param == "stars");
  }

  TEST_CASE("random tables agree with a full scan") {
    const SchemaSet schemas = parse_schemas(kRandomSchema);
    Rng rng(2026);
    for (int table = 0; table < 20; ++table) {
      const Database db(schemas, {{"thing", random_rows(rng, 100)}});
      for (int i = 0; i < 100; ++i) {
        QueryStatement q;
        q.domain = "thing";
        const size_t n = rng.below(4);
        for (size_t k = 0; k < n; ++k) q.filter.push_back(random_atom(rng));
        const ExecResult got = execute_query(db, q);
        const OracleResult want = oracle_query(db.rows("thing"), q);
        REQUIRE(got.count == want.count);
        if (want.count) {
          REQUIRE(got.first);
          CHECK(*got.first == *want.rows.front());
        }
        // Adding an atom never grows the result.
        QueryStatement tighter = q;
        tighter.filter.push_back(random_atom(rng));
        CHECK(execute_query(db, tighter).count <= got.count);
      }
    }
  }

  TEST_CASE("database validation") {
    const SchemaSet& s = five_world().schemas;
    CHECK_THROWS_AS(parse_database("{\"restaurant\": [{\"name\": \"x\"}]}", s), Error);
    CHECK_THROWS_AS(parse_database("{\"nope\": []}", s), Error);
    CHECK_THROWS_AS(parse_database("[", s), Error);
    const std::string row =
        R"({"name": "A", "food": "f", "price_range": "cheap", "area": "north",
            "address": "a", "phone": "1", "postcode": "p"})";
    try {
      parse_database("{\"restaurant\": [" + row + "," + row + "]}", s);
      FAIL("duplicate key accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kValidation);
    }
    Database db = parse_database("{\"restaurant\": [" + row + "]}", s);
    CHECK(db.find("restaurant", Value::str("a")) != nullptr);
  }

  TEST_CASE("actions") {
    const Database& db = five_world().db;
    Rng rng(7);
    ActionOutcome ok = execute_action(db, booking("golden wok"), rng, ExecMode::kLive);
    CHECK(ok.success);
    ActionOutcome missing = execute_action(db, booking("nowhere"), rng, ExecMode::kLive);
    CHECK_FALSE(missing.success);
    CHECK(missing.error_code == "missing_entity");
    CHECK(missing.param == "name");
    ActionStatement bad = booking("golden wok");
    bad.params["book_people"] = Value::str("many");
    CHECK(execute_action(db, bad, rng, ExecMode::kLive).error_code == "invalid_param");
    ActionStatement partial = booking("golden wok");
    partial.params.erase("book_time");
    CHECK_THROWS_AS(execute_action(db, partial, rng, ExecMode::kLive), Error);

    // Live mode never fails at random.
    for (int i = 0; i < 50; ++i) {
      CHECK(execute_action(db, booking("golden wok"), rng, ExecMode::kLive, 1.0).success);
    }
    // Simulated failures only blame non-key params, and replay with the seed.
    std::set<std::string> blamed;
    for (uint64_t seed = 0; seed < 40; ++seed) {
      Rng a(seed), b(seed);
      ActionOutcome x = execute_action(db, booking("golden wok"), a, ExecMode::kSimulate, 1.0);
      ActionOutcome y = execute_action(db, booking("golden wok"), b, ExecMode::kSimulate, 1.0);
      REQUIRE(x.error_code == "unavailable_slot_value");
      CHECK(x.param == y.param);
      blamed.insert(x.param);
    }
    CHECK(blamed == std::set<std::string>{"book_day", "book_people", "book_time"});
    ExecResult er = to_exec_result(missing);
    CHECK(er.error == ExecError{"missing_entity", "name"});
    CHECK(to_exec_result(ok).count == 1);
  }

  TEST_CASE("sampling reaches every row") {
    const World& w = five_world();
    const Database two =
        load_database(fixture("two_restaurants.db.json"), w.schemas);
    Rng rng(3);
    std::set<Value> names;
    for (int i = 0; i < 64; ++i) names.insert(sample_row(two, "restaurant", rng).at("name"));
    CHECK(names.size() == 2);
    std::set<Value> foods;
    for (int i = 0; i < 64; ++i) foods.insert(sample_value(w.db, "restaurant", "food", rng));
    CHECK(foods.size() == 4);
    CHECK(w.db.distinct("restaurant", "food").front() == Value::str("indian"));
  }
}
