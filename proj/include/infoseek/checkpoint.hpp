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

#ifndef INFOSEEK_CHECKPOINT_HPP_
#define INFOSEEK_CHECKPOINT_HPP_

#include <filesystem>
#include <iosfwd>

#include "infoseek/diffnet.hpp"
#include "infoseek/vocabulary.hpp"

namespace infoseek {

// On-disk layout (docs/formats.md):
//   line 1   JSON header terminated by '\n'
//   payload  every array of the header's "arrays" list, in order, as
//            little-endian IEEE-754 binary64, column-major
struct Checkpoint {
  Vocabulary vocabulary;
  Parameters params;
};

void write_checkpoint(std::ostream& out, const Vocabulary& vocab, const Parameters& params);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Vocabulary& vocab,
                     const Parameters& params);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace infoseek

#endif  // INFOSEEK_CHECKPOINT_HPP_
