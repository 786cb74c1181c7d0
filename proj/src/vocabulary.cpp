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

#include "infoseek/vocabulary.hpp"

#include <cctype>

#include "infoseek/errors.hpp"

namespace infoseek {

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    auto [it, inserted] = index_.emplace(tokens_[i], static_cast<TokenId>(i));
    if (!inserted) throw ConfigError("duplicate vocabulary token '" + tokens_[i] + "'");
  }
  auto stop = find(kStopToken);
  auto stop_dialogue = find(kStopDialogueToken);
  if (!stop || !stop_dialogue) {
    throw ConfigError("vocabulary must contain <stop> and <stopdialogue>");
  }
  stop_ = *stop;
  stop_dialogue_ = *stop_dialogue;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || id >= size()) throw ConfigError("token id out of range");
  return tokens_[static_cast<std::size_t>(id)];
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocabulary::id(std::string_view token) const {
  auto found = find(token);
  if (!found) throw ConfigError("unknown token '" + std::string(token) + "'");
  return *found;
}

std::vector<TokenId> Vocabulary::encode(std::string_view text) const {
  std::vector<TokenId> ids;
  for (const auto& word : split_words(text)) ids.push_back(id(word));
  return ids;
}

std::string Vocabulary::decode(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId t : ids) {
    if (!out.empty()) out += ' ';
    out += token(t);
  }
  return out;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) words.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return words;
}

}  // namespace infoseek
