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

#include "infoseek/guesswhich.hpp"

#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "infoseek/errors.hpp"

namespace infoseek {
namespace {

constexpr const char* kIs = "is";
constexpr const char* kQuestionMark = "?";
constexpr const char* kYes = "yes";
constexpr const char* kNo = "no";
constexpr const char* kNA = "na";

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

}  // namespace

Schema Schema::standard() {
  return Schema{{
      {"color", {"red", "green", "blue", "yellow", "purple"}},
      {"shape", {"circle", "square", "triangle", "star"}},
      {"size", {"small", "medium", "large"}},
      {"quadrant", {"topleft", "topright", "bottomleft", "bottomright"}},
  }};
}

void Schema::validate() const {
  if (attributes.empty()) throw ConfigError("schema: no attributes");
  std::set<std::string> words{std::string(kStopToken), std::string(kStopDialogueToken), kIs,
                              kQuestionMark, kYes, kNo, kNA};
  auto add = [&](const std::string& w) {
    if (w.empty() || !words.insert(w).second) {
      throw ConfigError("schema: word '" + w + "' is empty or not unique");
    }
  };
  for (const auto& a : attributes) {
    add(a.name);
    if (a.values.empty()) throw ConfigError("schema: attribute '" + a.name + "' has no values");
    for (const auto& v : a.values) add(v);
  }
}

int Schema::attribute_index(std::string_view name) const {
  for (int i = 0; i < num_attributes(); ++i) {
    if (attributes[static_cast<std::size_t>(i)].name == name) return i;
  }
  return -1;
}

int Schema::value_index(int attribute, std::string_view value) const {
  if (attribute < 0 || attribute >= num_attributes()) return -1;
  const auto& values = attributes[static_cast<std::size_t>(attribute)].values;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == value) return static_cast<int>(i);
  }
  return -1;
}

void GuessWhichConfig::validate() const {
  schema.validate();
  if (num_objects < 2 || num_objects > 20) throw ConfigError("guesswhich: num_objects must be 2..20");
  if (max_rounds < 1) throw ConfigError("guesswhich: max_rounds must be >= 1");
  if (max_statement_len < 1) throw ConfigError("guesswhich: max_statement_len must be >= 1");
  if (constrained && max_statement_len < 4) {
    throw ConfigError("guesswhich: constrained questions need max_statement_len >= 4");
  }
  if (!(epsilon >= 0.0 && epsilon < 0.5)) throw ConfigError("guesswhich: epsilon must lie in [0, 0.5)");
}

Vocabulary guesswhich_vocabulary(const Schema& schema) {
  schema.validate();
  std::vector<std::string> tokens{std::string(kStopToken), std::string(kStopDialogueToken), kIs,
                                  kQuestionMark};
  for (const auto& a : schema.attributes) tokens.push_back(a.name);
  for (const auto& a : schema.attributes) {
    for (const auto& v : a.values) tokens.push_back(v);
  }
  tokens.insert(tokens.end(), {kYes, kNo, kNA});
  return Vocabulary(std::move(tokens));
}

GameInstance generate_game(int num_objects, const Schema& schema, Rng& rng) {
  if (num_objects < 2) throw ConfigError("generate_game: need at least two objects");
  GameInstance g;
  g.objects.resize(static_cast<std::size_t>(num_objects));
  for (auto& obj : g.objects) {
    obj.resize(static_cast<std::size_t>(schema.num_attributes()));
    for (int a = 0; a < schema.num_attributes(); ++a) {
      obj[static_cast<std::size_t>(a)] = static_cast<int>(
          uniform_index(rng, schema.attributes[static_cast<std::size_t>(a)].values.size()));
    }
  }
  g.target = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(num_objects)));
  return g;
}

std::optional<Predicate> parse_question(std::span<const TokenId> tokens, const Vocabulary& vocab,
                                        const Schema& schema) {
  if (tokens.size() != 4) return std::nullopt;
  if (vocab.token(tokens[0]) != kIs || vocab.token(tokens[3]) != kQuestionMark) return std::nullopt;
  const int attribute = schema.attribute_index(vocab.token(tokens[1]));
  if (attribute < 0) return std::nullopt;
  const int value = schema.value_index(attribute, vocab.token(tokens[2]));
  if (value < 0) return std::nullopt;
  return Predicate{attribute, value};
}

Answer answer(const GameInstance& game, const std::optional<Predicate>& question, double epsilon,
              Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon < 0.5)) throw DomainError("answer: epsilon must lie in [0, 0.5)");
  if (!question) return Answer::kNA;
  bool truth = satisfies(game.objects[static_cast<std::size_t>(game.target)], *question);
  if (epsilon > 0.0 && uniform01(rng) < epsilon) truth = !truth;
  return truth ? Answer::kYes : Answer::kNo;
}

TokenId answer_token(const Vocabulary& vocab, Answer a) {
  switch (a) {
    case Answer::kYes: return vocab.id(kYes);
    case Answer::kNo: return vocab.id(kNo);
    case Answer::kNA: return vocab.id(kNA);
  }
  return vocab.id(kNA);
}

GuesserPosterior observe(const GuesserPosterior& prior, const GameInstance& game,
                         const std::optional<Predicate>& question, Answer a, double epsilon) {
  if (!question) return prior;
  return update_posterior(
      prior,
      [&](Eigen::Index i) { return satisfies(game.objects[static_cast<std::size_t>(i)], *question); },
      a, epsilon);
}

QuestionGrammar::QuestionGrammar(const Vocabulary& vocab, const Schema& schema, bool allow_stop)
    : vocab_(&vocab),
      schema_(&schema),
      allow_stop_(allow_stop),
      is_(vocab.id(kIs)),
      question_mark_(vocab.id(kQuestionMark)) {
  for (const auto& a : schema.attributes) {
    attribute_tokens_.push_back(vocab.id(a.name));
    std::vector<TokenId> values;
    for (const auto& v : a.values) values.push_back(vocab.id(v));
    value_tokens_.push_back(std::move(values));
  }
}

TokenFilter QuestionGrammar::admissible(std::span<const TokenId> statement) const {
  TokenFilter f = TokenFilter::Constant(vocab_->size(), false);
  switch (statement.size()) {
    case 0:
      f(is_) = true;
      if (allow_stop_) f(vocab_->stop_dialogue()) = true;
      break;
    case 1:
      for (TokenId t : attribute_tokens_) f(t) = true;
      break;
    case 2: {
      bool any = false;
      for (std::size_t a = 0; a < attribute_tokens_.size(); ++a) {
        if (statement[1] != attribute_tokens_[a]) continue;
        for (TokenId t : value_tokens_[a]) f(t) = true;
        any = true;
      }
      if (!any) f(question_mark_) = true;
      break;
    }
    case 3:
      f(question_mark_) = true;
      break;
    default:
      f(vocab_->stop()) = true;
      break;
  }
  return f;
}

bool QuestionGrammar::is_complete(std::span<const TokenId> statement) const {
  if (statement.empty()) return false;
  if (statement.back() == vocab_->stop() || statement.back() == vocab_->stop_dialogue()) return true;
  return statement.size() >= 4;
}

std::vector<TokenId> DialogueHistory::context() const {
  std::vector<TokenId> out;
  for (const auto& r : rounds) {
    out.insert(out.end(), r.statement.begin(), r.statement.end());
    out.push_back(r.response);
  }
  out.insert(out.end(), current_partial.begin(), current_partial.end());
  return out;
}

void write_games(std::ostream& out, const Schema& schema, std::span<const GameInstance> games) {
  out << "# guesswhich v1: target<TAB>object<TAB>object..., object = comma separated values\n";
  for (const auto& g : games) {
    out << g.target;
    for (const auto& obj : g.objects) {
      out << '\t';
      for (std::size_t a = 0; a < obj.size(); ++a) {
        if (a) out << ',';
        out << schema.attributes[a].values[static_cast<std::size_t>(obj[a])];
      }
    }
    out << '\n';
  }
}

std::vector<GameInstance> read_games(std::istream& in, const Schema& schema) {
  std::vector<GameInstance> games;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split(line, '\t');
    auto fail = [&](const std::string& why) {
      throw LoadError("games line " + std::to_string(lineno) + ": " + why);
    };
    if (fields.size() < 3) fail("need a target and at least two objects");
    GameInstance g;
    try {
      g.target = std::stoi(fields[0]);
    } catch (const std::exception&) {
      fail("bad target index");
    }
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto values = split(fields[i], ',');
      if (static_cast<int>(values.size()) != schema.num_attributes()) fail("wrong attribute count");
      GameObject obj;
      for (int a = 0; a < schema.num_attributes(); ++a) {
        const int v = schema.value_index(a, values[static_cast<std::size_t>(a)]);
        if (v < 0) fail("unknown value '" + values[static_cast<std::size_t>(a)] + "'");
        obj.push_back(v);
      }
      g.objects.push_back(std::move(obj));
    }
    if (g.target < 0 || g.target >= g.num_objects()) fail("target index out of range");
    games.push_back(std::move(g));
  }
  return games;
}

}  // namespace infoseek
