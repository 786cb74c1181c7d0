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

#ifndef INFOSEEK_VOCABULARY_HPP_
#define INFOSEEK_VOCABULARY_HPP_

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace infoseek {

using TokenId = Eigen::Index;

inline constexpr std::string_view kStopToken = "<stop>";
inline constexpr std::string_view kStopDialogueToken = "<stopdialogue>";

// Ordered list of distinct token strings. A token's id is its position.
// Both reserved tokens must be present exactly once.
class Vocabulary {
 public:
  explicit Vocabulary(std::vector<std::string> tokens);

  Eigen::Index size() const { return static_cast<Eigen::Index>(tokens_.size()); }
  const std::string& token(TokenId id) const;
  std::optional<TokenId> find(std::string_view token) const;
  // Throws ConfigError for unknown tokens.
  TokenId id(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }

  TokenId stop() const { return stop_; }
  TokenId stop_dialogue() const { return stop_dialogue_; }

  const std::vector<std::string>& tokens() const { return tokens_; }

  // Space separated words -> ids; unknown words throw ConfigError.
  std::vector<TokenId> encode(std::string_view text) const;
  std::string decode(std::span<const TokenId> ids) const;

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  TokenId stop_ = 0;
  TokenId stop_dialogue_ = 0;
};

std::vector<std::string> split_words(std::string_view text);

}  // namespace infoseek

#endif  // INFOSEEK_VOCABULARY_HPP_
