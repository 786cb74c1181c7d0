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

// Synthetic attribute-guessing game: a set of objects described by a fixed
// attribute schema, one hidden target, yes/no/NA answers to questions of the
// form "is <attribute> <value> ?".

#ifndef INFOSEEK_GUESSWHICH_HPP_
#define INFOSEEK_GUESSWHICH_HPP_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infoseek/decoder.hpp"
#include "infoseek/guesser.hpp"
#include "infoseek/random.hpp"
#include "infoseek/vocabulary.hpp"

namespace infoseek {

struct Attribute {
  std::string name;
  std::vector<std::string> values;
};

struct Schema {
  std::vector<Attribute> attributes;

  // color(5) shape(4) size(3) quadrant(4)
  static Schema standard();
  void validate() const;
  int num_attributes() const { return static_cast<int>(attributes.size()); }
  int attribute_index(std::string_view name) const;                // -1 if absent
  int value_index(int attribute, std::string_view value) const;     // -1 if absent
};

// Value index per attribute.
using GameObject = std::vector<int>;

struct GameInstance {
  std::vector<GameObject> objects;
  int target = 0;

  int num_objects() const { return static_cast<int>(objects.size()); }
};

struct Predicate {
  int attribute = 0;
  int value = 0;
  bool operator==(const Predicate&) const = default;
};

inline bool satisfies(const GameObject& object, const Predicate& p) {
  return object[static_cast<std::size_t>(p.attribute)] == p.value;
}

struct GuessWhichConfig {
  Schema schema = Schema::standard();
  int num_objects = 8;
  int max_rounds = 5;         // T_dialogue
  int max_statement_len = 4;  // M_max
  double epsilon = 0.0;       // answer noise
  // Restrict generation to well-formed questions (plus <stopdialogue>).
  bool constrained = true;
  // Under the constraint, also let the questioner end the dialogue with
  // <stopdialogue>. Off: ending early is left to the entropy stopping rule.
  bool agent_stop = false;

  void validate() const;
};

// <stop> <stopdialogue> is ? <attribute names...> <values...> yes no na
Vocabulary guesswhich_vocabulary(const Schema& schema);

GameInstance generate_game(int num_objects, const Schema& schema, Rng& rng);

// Predicate iff tokens are exactly `is <attribute> <value> ?` with a value
// belonging to that attribute; std::nullopt (NA) otherwise.
std::optional<Predicate> parse_question(std::span<const TokenId> tokens, const Vocabulary& vocab,
                                        const Schema& schema);

// Truthful answer about the target, flipped with probability epsilon.
Answer answer(const GameInstance& game, const std::optional<Predicate>& question, double epsilon,
              Rng& rng);

TokenId answer_token(const Vocabulary& vocab, Answer a);

inline int reward(int guess_index, int target_index) { return guess_index == target_index ? 1 : 0; }

// Bayes filter step for one question/answer pair.
GuesserPosterior observe(const GuesserPosterior& prior, const GameInstance& game,
                         const std::optional<Predicate>& question, Answer a, double epsilon);

// Position-wise grammar of the question language. With `allow_stop` the
// first position also admits <stopdialogue>.
class QuestionGrammar final : public StatementGrammar {
 public:
  QuestionGrammar(const Vocabulary& vocab, const Schema& schema, bool allow_stop = true);
  TokenFilter admissible(std::span<const TokenId> statement) const override;
  bool is_complete(std::span<const TokenId> statement) const override;

 private:
  const Vocabulary* vocab_;
  const Schema* schema_;
  bool allow_stop_ = true;
  TokenId is_ = 0, question_mark_ = 0;
  std::vector<TokenId> attribute_tokens_;
  std::vector<std::vector<TokenId>> value_tokens_;
};

// Ordered (statement, response) pairs plus the statement being generated.
struct DialogueHistory {
  struct Round {
    std::vector<TokenId> statement;
    TokenId response = 0;
  };
  std::vector<Round> rounds;
  std::vector<TokenId> current_partial;
  int max_statement_len = 4;
  int max_rounds = 5;

  // Flattened scorer input: each statement followed by its response token,
  // then the partial statement.
  std::vector<TokenId> context() const;
};

// Line format, one game per record:
//   <target>\t<v,v,v,v>\t<v,v,v,v>...
// where each v is a value word of the schema. Lines starting with '#' are
// comments.
void write_games(std::ostream& out, const Schema& schema, std::span<const GameInstance> games);
std::vector<GameInstance> read_games(std::istream& in, const Schema& schema);

}  // namespace infoseek

#endif  // INFOSEEK_GUESSWHICH_HPP_
