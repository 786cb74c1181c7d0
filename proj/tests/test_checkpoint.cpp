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

#include <cstring>
#include <sstream>
#include <string>

#include "infoseek/checkpoint.hpp"
#include "infoseek/errors.hpp"

using namespace infoseek;

namespace {

Vocabulary small_vocab() { return Vocabulary({"<stop>", "<stopdialogue>", "a", "b", "c"}); }

}  // namespace

TEST_CASE("checkpoint round trip is bit exact") {
  Rng rng(3);
  const auto vocab = small_vocab();
  const auto p = Parameters::uniform(5, 3, 4, rng, 0.7);
  std::stringstream buf;
  write_checkpoint(buf, vocab, p);
  const Checkpoint back = read_checkpoint(buf);
  CHECK(back.vocabulary == vocab);
  CHECK(back.params == p);
}

TEST_CASE("checkpoint header is one JSON line followed by little-endian doubles") {
  auto p = Parameters::zeros(5, 1, 1);
  p.token_embeddings(0, 0) = 1.0;
  std::stringstream buf;
  write_checkpoint(buf, small_vocab(), p);
  const std::string bytes = buf.str();
  const auto nl = bytes.find('\n');
  REQUIRE(nl != std::string::npos);
  CHECK(bytes.substr(0, 1) == "{");
  CHECK(bytes.find("\"infoseek-checkpoint\"") < nl);
  // 1.0 as binary64 little-endian: 00 00 00 00 00 00 f0 3f
  const unsigned char* first = reinterpret_cast<const unsigned char*>(bytes.data() + nl + 1);
  CHECK(first[6] == 0xf0);
  CHECK(first[7] == 0x3f);
  CHECK(bytes.size() == nl + 1 + 8 * static_cast<std::size_t>(p.parameter_count()));
}

TEST_CASE("corrupt checkpoints are rejected") {
  std::stringstream empty;
  CHECK_THROWS_AS(read_checkpoint(empty), LoadError);
  std::stringstream junk("{\"format\":\"something-else\"}\n");
  CHECK_THROWS_AS(read_checkpoint(junk), LoadError);

  Rng rng(1);
  std::stringstream buf;
  write_checkpoint(buf, small_vocab(), Parameters::uniform(5, 2, 3, rng));
  std::string truncated = buf.str();
  truncated.resize(truncated.size() - 8);
  std::stringstream cut(truncated);
  CHECK_THROWS_AS(read_checkpoint(cut), LoadError);
}

TEST_CASE("missing checkpoint file raises a load error") {
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/infoseek/model.ckpt"), LoadError);
}
