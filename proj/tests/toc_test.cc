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
#include "forge/engine.h"
#include "forge/toc.h"
#include "world.h"

using namespace forge;
using forge::testing::five_world;
using forge::testing::World;

namespace {

Context run(const Context& ctx, const UserState& us) {
  Rng rng(1);
  DatabaseExecutor exec(five_world().db, rng, ExecMode::kLive, 0.0);
  return advance_context(ctx, us, exec, five_world().schemas);
}

}  // namespace

TEST_SUITE("toc") {
  TEST_CASE("values") {
    CHECK(Value::str("Indian").normalized() == Value::str(" indian ").normalized());
    CHECK(format_time({18 * 60 + 5}) == "18:05");
    CHECK(parse_time("7:30")->minutes == 7 * 60 + 30);
    CHECK_FALSE(parse_time("25:00"));
    CHECK(parse_day("fri") == Day::kFri);
    CHECK(parse_day("Saturday") == Day::kSat);
    CHECK(Value::integer(3).fits(ValueKind::kInteger));
    CHECK_FALSE(Value::str("x").fits(ValueKind::kInteger));
    CHECK(value_from_text(ValueKind::kTimeOfDay, "18:00") == Value::time({18 * 60}));
    CHECK_FALSE(value_from_text(ValueKind::kInteger, "many"));
  }

  TEST_CASE("new query constraints merge over the executed query") {
    const World& w = five_world();
    Context ctx = run({}, w.user("Exec: restaurant ( price_range = \" cheap \" ) ;"));
    const Statement* q = ctx.executed_query("restaurant");
    REQUIRE(q);
    CHECK(q->result->count == 2);
    ctx = run(ctx, w.user("Exec: restaurant ( food = \" Indian \" ) ;"));
    q = ctx.executed_query("restaurant");
    REQUIRE(q);
    CHECK(q->as_query().filter.size() == 2);
    CHECK(q->as_query().atom("price_range")->values[0] == Value::str("cheap"));
    CHECK(q->as_query().atom("food")->values[0] == Value::str("Indian"));
    CHECK(q->result->count == 1);
    CHECK(ctx.domains.at("restaurant").query_fresh);
  }

  TEST_CASE("a query pinning an entity neither inherits nor passes on constraints") {
    const World& w = five_world();
    Context ctx = run({}, w.user("Exec: restaurant ( price_range = \" cheap \" ) ;"));
    ctx = run(ctx, w.user("Exec: restaurant ( name = \" golden wok \" ) ;"));
    CHECK(ctx.executed_query("restaurant")->as_query().filter.size() == 1);
    ctx = run(ctx, w.user("Exec: restaurant ( food = \" british \" ) ;"));
    const auto& filter = ctx.executed_query("restaurant")->as_query().filter;
    REQUIRE(filter.size() == 1);
    CHECK(filter[0].slot == "food");
  }

  TEST_CASE("greet on the null context only sets the last act") {
    const Context ctx = run({}, five_world().user("Greet:"));
    CHECK(ctx.last_act.is(UserAct::kGreet));
    CHECK(ctx.domains.empty());
    CHECK(ctx.carryover.empty());
    CHECK_FALSE(ctx.focus);
  }

  TEST_CASE("an incomplete action is carried over and dropped by a new statement") {
    const World& w = five_world();
    Context ctx = run({}, w.user("Exec: restaurant . make_reservation ( name = \" curry prince \" ) ;"));
    REQUIRE(ctx.carryover.size() == 1);
    CHECK_FALSE(ctx.executed_action("restaurant"));
    ctx = run(ctx, w.user("Exec: restaurant ( area = \" north \" ) ;"));
    CHECK(ctx.carryover.empty());
    CHECK(check_context(ctx, w.schemas).empty());
  }

  TEST_CASE("carried parameters merge into the next action of the same name") {
    const World& w = five_world();
    Context ctx = run({}, w.user("Exec: restaurant . make_reservation ( name = \" curry prince \" ) ;"));
    ctx = run(ctx, w.user("Exec: restaurant . make_reservation ( book_day = friday , "
                          "book_people = 2 , book_time = 18:00 ) ;"));
    CHECK(ctx.carryover.empty());
    const Statement* a = ctx.executed_action("restaurant");
    REQUIRE(a);
    CHECK(a->as_action().params.size() == 4);
    CHECK_FALSE(a->result->error);
  }

  TEST_CASE("attach_agent_state") {
    const World& w = five_world();
    const Context base = run({}, w.user("Exec: restaurant ( ) ;"));
    AgentState sq;
    sq.act = AgentAct::kSearchQuestion;
    sq.requested = {{"restaurant", "area"}};
    const Context c1 = attach_agent_state(base, sq);
    CHECK(c1.agent.requested.count({"restaurant", "area"}) == 1);
    CHECK(c1.last_act.is(AgentAct::kSearchQuestion));
    CHECK(c1.domains == base.domains);

    AgentState greet;
    greet.act = AgentAct::kGreet;
    Context c2 = attach_agent_state(base, greet);
    CHECK(c2.last_act.is(AgentAct::kGreet));
    c2.last_act = base.last_act;
    CHECK(c2 == base);

    AgentState rec;
    rec.act = AgentAct::kRecommendOne;
    ActionStatement a{"restaurant", "make_reservation", {{"name", Value::str("curry prince")}}};
    rec.proposed = Statement::action(a, StatementStatus::kProposed);
    const Context c3 = attach_agent_state(base, rec);
    REQUIRE(c3.agent.proposed);
    CHECK(c3.agent.proposed->as_action() == a);
    CHECK(agent_facing(c3).agent.empty());
  }

  TEST_CASE("states_equal and slots_of") {
    const World& w = five_world();
    CHECK(states_equal(w.user("Exec: restaurant ( area = \" east \" , food = \" indian \" ) ;"),
                       w.user("Exec: restaurant ( food = \" Indian \" , area = \" east \" ) ;")));
    const UserState with = w.user("Exec: phone of restaurant ( food = \" Indian \" ) ;");
    const UserState without = w.user("Exec: restaurant ( food = \" Indian \" ) ;");
    CHECK_FALSE(states_equal(with, without));
    CHECK(slots_of(with) == slots_of(without));
    const auto dc = slots_of(w.user("Exec: restaurant ( area = dontcare ) ;"));
    CHECK(dc.count({"restaurant", "area", Value::dontcare()}) == 1);
    // operators and acts are ignored by slots_of
    CHECK(slots_of(w.user("Insist: restaurant ( food = \" indian \" ) ;")) == slots_of(without));
  }

  TEST_CASE("invariant checks flag bad statements") {
    const World& w = five_world();
    Statement s = Statement::query({"restaurant", {{"bogus", FilterOp::kEq, {Value::str("x")}}}, {}});
    CHECK_FALSE(check_statement(s, w.schemas).empty());
    Statement ok = Statement::query({"restaurant", {{"food", FilterOp::kEq, {Value::str("x")}}}, {}});
    CHECK(check_statement(ok, w.schemas).empty());
  }
}
