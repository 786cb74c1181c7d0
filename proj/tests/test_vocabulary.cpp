// Copyright 2026 The Infoseek Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "doctest.h"

#include "infoseek/errors.hpp"
#include "infoseek/vocabulary.hpp"

using infoseek::Vocabulary;

TEST_CASE("token ids are positions") {
  Vocabulary v({"<stop>", "a", "<stopdialogue>", "b"});
  CHECK(v.size() == 4);
  CHECK(v.id("a") == 1);
  CHECK(v.stop() == 0);
  CHECK(v.stop_dialogue() == 2);
  CHECK(v.token(3) == "b");
  CHECK_FALSE(v.find("c").has_value());
}

TEST_CASE("reserved tokens must appear exactly once and tokens must be unique") {
  CHECK_THROWS_AS(Vocabulary({"a", "<stopdialogue>"}), infoseek::ConfigError);
  CHECK_THROWS_AS(Vocabulary({"<stop>", "a"}), infoseek::ConfigError);
  CHECK_THROWS_AS(Vocabulary({"<stop>", "<stopdialogue>", "a", "a"}), infoseek::ConfigError);
  CHECK_THROWS_AS(Vocabulary({"<stop>", "<stopdialogue>", "<stop>"}), infoseek::ConfigError);
}

TEST_CASE("encode and decode round trip") {
  Vocabulary v({"<stop>", "<stopdialogue>", "is", "red", "?"});
  const auto ids = v.encode("is  red ?");
  REQUIRE(ids.size() == 3);
  CHECK(ids[0] == 2);
  CHECK(v.decode(ids) == "is red ?");
  CHECK_THROWS_AS(v.encode("is blue ?"), infoseek::ConfigError);
  CHECK_THROWS_AS(v.token(9), infoseek::ConfigError);
}
