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
#include "forge/util.h"

using namespace forge;

TEST_SUITE("util") {
  TEST_CASE("rng streams repeat for equal seeds") {
    Rng a(17), b(17), c(18);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
      const uint64_t x = a.next();
      CHECK(x == b.next());
      differs = differs || x != c.next();
    }
    CHECK(differs);
  }

  TEST_CASE("bounded draws stay in range and cover it") {
    Rng r(3);
    std::set<uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
      const uint64_t x = r.below(7);
      REQUIRE(x < 7);
      seen.insert(x);
      const double u = r.uniform();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
    }
    CHECK(seen.size() == 7);
  }

  TEST_CASE("mix_seed separates streams") {
    CHECK(mix_seed(1, 0) != mix_seed(1, 1));
    CHECK(mix_seed(1, 0) != mix_seed(2, 0));
    CHECK(mix_seed(5, 9) == mix_seed(5, 9));
  }

  TEST_CASE("tokenize lowercases and splits punctuation") {
    const std::vector<std::string> want = {"yes", ",", "book", "it", "at", "18:30", "please", "!"};
    CHECK(tokenize("Yes, book it at 18:30 please!") == want);
    CHECK(tokenize("   ").empty());
    // not a time: only two digits after the colon count
    CHECK(tokenize("1:234") == std::vector<std::string>{"1", ":", "234"});
  }

  TEST_CASE("string helpers") {
    CHECK(trim("  a b \n") == "a b");
    CHECK(join({"a", "b", "c"}, "-") == "a-b-c");
    CHECK(split_ws(" a  b ") == std::vector<std::string>{"a", "b"});
    CHECK(is_identifier("book_day"));
    CHECK_FALSE(is_identifier("book day"));
    CHECK_FALSE(is_identifier(""));
  }
}
