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

// Deal-or-No-Deal style negotiation over three item types with a
// structured proposal language:
//   propose book <n> hat <n> ball <n>     (n = items the speaker keeps)
//   agree                                 (accept the other side's proposal)

#ifndef INFOSEEK_NEGOTIATION_HPP_
#define INFOSEEK_NEGOTIATION_HPP_

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infoseek/decoder.hpp"
#include "infoseek/ensemble.hpp"
#include "infoseek/random.hpp"
#include "infoseek/vocabulary.hpp"

namespace infoseek {

inline constexpr int kItemTypes = 3;
inline constexpr std::array<const char*, kItemTypes> kItemNames{"book", "hat", "ball"};
inline constexpr int kValueTotal = 10;
inline constexpr int kMinItems = 5;
inline constexpr int kMaxItems = 7;
inline constexpr int kDefaultMaxTurns = 10;
inline constexpr int kProposalLength = 7;

using ItemCounts = std::array<int, kItemTypes>;

enum class Agent { kA = 0, kB = 1 };
inline Agent other(Agent a) { return a == Agent::kA ? Agent::kB : Agent::kA; }

struct NegotiationSetup {
  ItemCounts counts{};
  ItemCounts values_a{};
  ItemCounts values_b{};

  const ItemCounts& values(Agent a) const { return a == Agent::kA ? values_a : values_b; }
  bool operator==(const NegotiationSetup&) const = default;
};

// Empty when the setup satisfies every constraint: 5..7 items in total,
// each agent's values sum to 10 over the collection, every type is worth
// something to someone, and some type is worth something to both.
std::vector<std::string> setup_violations(const NegotiationSetup& setup);
inline bool is_valid_setup(const NegotiationSetup& s) { return setup_violations(s).empty(); }

// Exactly uniform over the valid set, by rejection (docs/formats.md).
NegotiationSetup sample_values(Rng& rng);

struct Action {
  enum class Kind { kPropose, kAgree, kEndDialogue, kInvalid };
  Kind kind = Kind::kInvalid;
  ItemCounts take{};  // kPropose: items the speaker keeps

  static Action propose(ItemCounts take) { return {Kind::kPropose, take}; }
  static Action agree() { return {Kind::kAgree, {}}; }
  static Action end_dialogue() { return {Kind::kEndDialogue, {}}; }
  static Action invalid() { return {Kind::kInvalid, {}}; }
  bool operator==(const Action&) const = default;
};

struct DealOutcome {
  bool agreed = false;
  ItemCounts allocation_a{};  // items agent A receives
  int points_a = 0;
  int points_b = 0;
  std::optional<Agent> closer;  // who said agree
};

struct Utterance {
  Agent speaker = Agent::kA;
  std::vector<TokenId> tokens;
  Action action;
};

struct NegotiationState {
  int turn = 0;
  int max_turns = kDefaultMaxTurns;
  Agent to_act = Agent::kA;
  std::vector<Utterance> history;
  std::optional<ItemCounts> proposal_a;  // standing proposal, as A's allocation
  std::optional<Agent> proposer;
  bool terminal = false;
  std::optional<DealOutcome> outcome;

  static NegotiationState initial(Agent first, int max_turns = kDefaultMaxTurns);
  bool can_agree(Agent a) const { return proposal_a.has_value() && proposer != a; }
};

// <stop> <stopdialogue> propose agree book hat ball 0..10 <you> <them>
Vocabulary negotiation_vocabulary();

std::vector<TokenId> utterance_tokens(const Vocabulary& vocab, const Action& action);

// Grammar-exact parse. A single trailing <stop> is ignored. Counts above the
// available quantity, and agree without a standing proposal from the other
// agent, are Invalid.
Action parse_utterance(std::span<const TokenId> tokens, const Vocabulary& vocab,
                       const NegotiationSetup& setup, const NegotiationState& state,
                       Agent speaker);

// Applies one turn. Invalid and <stopdialogue> consume the turn without
// changing the proposal; reaching max_turns without agreement ends with
// (0, 0). Throws ProtocolError if the state is terminal or `actor` is not
// the agent to act.
NegotiationState step(const NegotiationState& state, const NegotiationSetup& setup, Agent actor,
                      const Action& action, std::vector<TokenId> tokens = {});

DealOutcome settle(const NegotiationSetup& setup, const ItemCounts& allocation_a, Agent closer);

// Scorer input from `self`'s point of view:
//   book c v hat c v ball c v, then per utterance <you>|<them> + tokens.
std::vector<TokenId> negotiation_context(const Vocabulary& vocab, const NegotiationSetup& setup,
                                         const NegotiationState& state, Agent self);

// Valid utterances at the next position of a statement.
class ProposalGrammar final : public StatementGrammar {
 public:
  ProposalGrammar(const Vocabulary& vocab, const ItemCounts& counts, bool agree_allowed);
  TokenFilter admissible(std::span<const TokenId> statement) const override;
  bool is_complete(std::span<const TokenId> statement) const override;

 private:
  const Vocabulary* vocab_;
  ItemCounts counts_;
  bool agree_allowed_;
  TokenId propose_, agree_;
  std::array<TokenId, kItemTypes> items_{};
  std::array<TokenId, kValueTotal + 1> digits_{};
};

// Anything that can take a turn.
class Negotiator {
 public:
  virtual ~Negotiator() = default;
  virtual Utterance act(const NegotiationSetup& setup, const NegotiationState& state, Agent self,
                        Rng& rng) = 0;
};

// Rule-based counterpart: agrees when the standing proposal is worth at
// least `accept_threshold` to it, otherwise proposes to keep every item it
// values.
class ScriptedNegotiator final : public Negotiator {
 public:
  ScriptedNegotiator(const Vocabulary& vocab, int accept_threshold = 5);
  Utterance act(const NegotiationSetup& setup, const NegotiationState& state, Agent self,
                Rng& rng) override;

 private:
  const Vocabulary* vocab_;
  int accept_threshold_;
};

// Speaks with the recurrent scorer through decode_statement.
class PolicyNegotiator final : public Negotiator {
 public:
  PolicyNegotiator(const Vocabulary& vocab, const Parameters& params, DecoderConfig decoder,
                   EnsembleConfig ensemble, bool constrained = true);
  Utterance act(const NegotiationSetup& setup, const NegotiationState& state, Agent self,
                Rng& rng) override;

 private:
  const Vocabulary* vocab_;
  const Parameters* params_;
  DecoderConfig decoder_;
  EnsembleConfig ensemble_;
  bool constrained_;
};

struct NegotiationConfig {
  int max_turns = kDefaultMaxTurns;
  // Restrict generation to well-formed utterances.
  bool constrained = true;
  // The scripted counterpart accepts offers worth at least this much to it.
  int opponent_threshold = 5;

  void validate() const;
};

// Every valid action for the agent to act: all proposals, plus agree when a
// standing proposal from the other side exists.
std::vector<Action> candidate_actions(const NegotiationSetup& setup, const NegotiationState& state);

struct RolloutEstimate {
  Action action;
  double expected_points = 0.0;
};

// For each candidate action of the acting agent, plays `samples`
// continuations to the end (`self_policy` for the acting agent, `counterpart`
// for the other) and averages the acting agent's points. Each continuation
// draws from its own generator derived from one draw of `rng`.
std::vector<RolloutEstimate> rollout_estimate(const Vocabulary& vocab,
                                              const NegotiationSetup& setup,
                                              const NegotiationState& state,
                                              Negotiator& self_policy, Negotiator& counterpart,
                                              int samples, Rng& rng);

// Line format, one setup per record:
//   <counts>\t<values_a>\t<values_b>     each a comma separated triple
void write_setups(std::ostream& out, std::span<const NegotiationSetup> setups);
std::vector<NegotiationSetup> read_setups(std::istream& in);

}  // namespace infoseek

#endif  // INFOSEEK_NEGOTIATION_HPP_
